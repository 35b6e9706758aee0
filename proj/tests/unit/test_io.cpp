#include "hrn/error.hpp"
#include "hrn/hierarchy.hpp"
#include "hrn/io.hpp"
#include "hrn/synth.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace hrn;

namespace {

std::filesystem::path scratch(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / "hrn_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

ErrorCode code_of(const std::string &text, bool header, std::string *what) {
  try {
    parse_csv(text, header);
  } catch (const Error &e) {
    *what = e.what();
    return e.code();
  }
  return ErrorCode::Internal;
}

} // namespace

TEST_CASE("format_real round trips") {
  for (double v : {0.0, -1.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, 418.9829})
    CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("parse_csv") {
  const Dataset D = parse_csv("x,y\n0,1\n1,2\n2,3", true);
  CHECK(D.size() == 3);
  CHECK(D.dim() == 1);
  CHECK(D.Y[2] == 3.0);

  const Dataset C = parse_csv("# comment\n\n1, 2 ,3\r\n4,5,+6\n", false);
  CHECK(C.dim() == 2);
  CHECK(C.Y[1] == 6.0);

  std::string what;
  CHECK(code_of("x,y\n0,1\nabc,2\n", true, &what) == ErrorCode::Parse);
  CHECK(what.find("data row 2") != std::string::npos);
  CHECK(what.find("column 1") != std::string::npos);

  CHECK(code_of("0,1\n1,2,3\n", false, &what) == ErrorCode::Parse);
  CHECK(what.find("data row 2") != std::string::npos);
  CHECK(code_of("0,nan\n", false, &what) == ErrorCode::Parse);
  CHECK(code_of("0,inf\n", false, &what) == ErrorCode::Parse);
  CHECK(code_of("", false, &what) == ErrorCode::Parse);
  CHECK(code_of("x,y\n", true, &what) == ErrorCode::Parse);
  CHECK(code_of("1\n2\n", false, &what) == ErrorCode::Parse);
}

TEST_CASE("dataset csv round trip") {
  const Dataset D = sample(SynthSpec{SynthFamily::Bohachevsky2d, 10000, 25.0, {}, 3});
  const auto path = scratch("roundtrip.csv");
  write_dataset_csv(D, path);
  const Dataset back = ingest_csv(path, true);
  CHECK((back.X.array() == D.X.array()).all());
  CHECK((back.Y.array() == D.Y.array()).all());
  CHECK(dataset_hash(back) == dataset_hash(D));
  Dataset other = D;
  other.Y[17] += 1e-12;
  CHECK(dataset_hash(other) != dataset_hash(D));
  CHECK_THROWS_AS(ingest_csv(scratch("missing.csv"), true), Error);

  const Matrix Q = ingest_query_csv(path, true);
  CHECK(Q.cols() == 3);
}

TEST_CASE("model file round trip") {
  const Dataset D = sample(SynthSpec{SynthFamily::Schwefel1d, 80, 10.0, {}, 1});
  ModelFile file;
  file.model = fit(D);
  file.parameters.seed = 12345678901234567ULL;
  file.provenance.input_hash = "00000000deadbeef";
  file.provenance.source = "unit";
  const std::string text = model_to_json(file);
  const ModelFile back = model_from_json(text);
  CHECK(model_to_json(back) == text);
  CHECK(back.parameters.seed == 12345678901234567ULL);
  CHECK(back.parameters.T_auto);
  CHECK(!back.provenance.created.has_value());
  CHECK((back.model.C_t.array() == file.model.C_t.array()).all());
  CHECK((back.model.X_t.array() == file.model.X_t.array()).all());
  CHECK(back.model.Lambda_t == file.model.Lambda_t);
  CHECK(back.model.history.size() == file.model.history.size());
  for (std::size_t i = 0; i < back.model.history.size(); ++i) {
    CHECK(back.model.history[i].cost == file.model.history[i].cost);
    CHECK(back.model.history[i].selected == file.model.history[i].selected);
  }

  std::string broken = text;
  broken.replace(broken.find("\"schema_version\": 1"), 19, "\"schema_version\": 7");
  CHECK_THROWS_AS(model_from_json(broken), Error);
  CHECK_THROWS_AS(model_from_json("{"), Error);
  CHECK_THROWS_AS(model_from_json("{}"), Error);
}

TEST_CASE("report table") {
  const Dataset D = sample(SynthSpec{SynthFamily::Schwefel1d, 60, 10.0, {}, 2});
  const SparseModel m = fit(D);
  const std::string table = report_table_csv(m);
  CHECK(table.rfind("s,epsilon,rank,comp,cost,q1,lambda1,convergent\n", 0) == 0);
  std::size_t rows = 0, convergent = 0, pos = 0;
  while ((pos = table.find('\n', pos)) != std::string::npos) {
    ++pos;
    ++rows;
  }
  for (std::size_t p = 0; (p = table.find(",1\n", p)) != std::string::npos; ++p)
    ++convergent;
  CHECK(rows == m.history.size() + 1);
  CHECK(convergent == 1);
  CHECK(report_summary(m).find("<- convergence") != std::string::npos);
}

TEST_CASE("predictions csv") {
  PredictionSet set;
  set.X_m = (Matrix(2, 1) << 0.5, 1.5).finished();
  set.mean = (Vector(2) << 1.0, 2.0).finished();
  CHECK(predictions_csv(set, false) == "x1,mean\n0.5,1\n1.5,2\n");
  set.std = Vector::Ones(2);
  set.lower = set.mean.array() - 2;
  set.upper = set.mean.array() + 2;
  set.df_res = 7.5;
  set.sigma2_hat = 0.25;
  const std::string with = predictions_csv(set, true);
  CHECK(with == "# alpha=0.05\n# df_res=7.5\n# sigma2_hat=0.25\n"
                "x1,mean,std,lower,upper\n0.5,1,1,-1,3\n1.5,2,1,0,4\n");
}
