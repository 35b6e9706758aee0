#include "hrn/io.hpp"

#include "hrn/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

namespace hrn {

using json = nlohmann::ordered_json;

std::string format_real(double value) {
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out)
    fail(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && ws(s.back()))
    s.remove_suffix(1);
  return s;
}

struct CsvTable {
  std::vector<std::vector<double>> rows;
  std::size_t columns = 0;
};

CsvTable parse_table(const std::string &text, bool has_header,
                     std::size_t min_columns) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t row_no = 0;
  bool header_pending = has_header;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#')
      continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    ++row_no;
    const auto where = [&](std::size_t col) {
      return "data row " + std::to_string(row_no) + " (line " +
             std::to_string(line_no) + "), column " + std::to_string(col);
    };

    std::vector<double> values;
    std::size_t col = 0;
    std::string_view cells = line;
    while (true) {
      ++col;
      const auto comma = cells.find(',');
      std::string_view cell = trim(cells.substr(0, comma));
      if (!cell.empty() && cell.front() == '+')
        cell.remove_prefix(1);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc{} ||
          res.ptr != cell.data() + cell.size())
        fail(ErrorCode::Parse, where(col) + ": '" + std::string(cell) +
                                   "' is not a number");
      if (!std::isfinite(v))
        fail(ErrorCode::Parse, where(col) + ": value must be finite");
      values.push_back(v);
      if (comma == std::string_view::npos)
        break;
      cells = cells.substr(comma + 1);
    }
    if (table.rows.empty()) {
      if (values.size() < min_columns)
        fail(ErrorCode::Parse, where(values.size()) + ": expected at least " +
                                   std::to_string(min_columns) + " columns");
      table.columns = values.size();
    } else if (values.size() != table.columns) {
      fail(ErrorCode::Parse, where(values.size()) + ": row has " +
                                 std::to_string(values.size()) +
                                 " columns, expected " +
                                 std::to_string(table.columns));
    }
    table.rows.push_back(std::move(values));
  }
  if (table.rows.empty())
    fail(ErrorCode::Parse, "no data rows");
  return table;
}

} // namespace

Dataset parse_csv(const std::string &text, bool has_header) {
  const CsvTable table = parse_table(text, has_header, 2);
  const Index n = static_cast<Index>(table.rows.size());
  const Index d = static_cast<Index>(table.columns) - 1;
  Dataset D;
  D.X.resize(n, d);
  D.Y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto &row = table.rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < d; ++j)
      D.X(i, j) = row[static_cast<std::size_t>(j)];
    D.Y[i] = row.back();
  }
  return D;
}

Dataset ingest_csv(const std::filesystem::path &path, bool has_header) {
  try {
    return parse_csv(read_file(path), has_header);
  } catch (const Error &e) {
    if (e.code() == ErrorCode::Parse)
      fail(ErrorCode::Parse, path.string() + ": " + e.what());
    throw;
  }
}

Matrix ingest_query_csv(const std::filesystem::path &path, bool has_header) {
  try {
    const CsvTable table = parse_table(read_file(path), has_header, 1);
    Matrix X(static_cast<Index>(table.rows.size()),
             static_cast<Index>(table.columns));
    for (Index i = 0; i < X.rows(); ++i)
      for (Index j = 0; j < X.cols(); ++j)
        X(i, j) = table.rows[static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(j)];
    return X;
  } catch (const Error &e) {
    if (e.code() == ErrorCode::Parse)
      fail(ErrorCode::Parse, path.string() + ": " + e.what());
    throw;
  }
}

void write_dataset_csv(const Dataset &D, const std::filesystem::path &path) {
  std::string out;
  for (Index j = 0; j < D.dim(); ++j)
    out += "x" + std::to_string(j + 1) + ",";
  out += "y\n";
  for (Index i = 0; i < D.size(); ++i) {
    for (Index j = 0; j < D.dim(); ++j)
      out += format_real(D.X(i, j)) + ",";
    out += format_real(D.Y[i]) + "\n";
  }
  write_file(path, out);
}

std::uint64_t dataset_hash(const Dataset &D) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](const void *data, std::size_t bytes) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t n = static_cast<std::uint64_t>(D.size());
  const std::uint64_t d = static_cast<std::uint64_t>(D.dim());
  mix(&n, sizeof n);
  mix(&d, sizeof d);
  for (Index i = 0; i < D.size(); ++i)
    for (Index j = 0; j < D.dim(); ++j) {
      const double v = D.X(i, j);
      mix(&v, sizeof v);
    }
  mix(D.Y.data(), sizeof(double) * static_cast<std::size_t>(D.size()));
  return h;
}

// ---------------------------------------------------------------------------
// Model file

namespace {

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double real_or_inf(const json &j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json vec(const Vector &v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i)
    a.push_back(v[i]);
  return a;
}

json mat(const Matrix &m) {
  json a = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

Vector to_vec(const json &j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i)
    v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

Matrix to_mat(const json &j, Index cols) {
  Matrix m(static_cast<Index>(j.size()), cols);
  for (Index i = 0; i < m.rows(); ++i) {
    const json &row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != cols)
      fail(ErrorCode::Parse, "model file: ragged coordinate matrix");
    for (Index k = 0; k < cols; ++k)
      m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

json scale_json(const ScaleRecord &r) {
  return json{{"s", r.s},
              {"epsilon", r.epsilon},
              {"rank", r.rank},
              {"comp", r.comp},
              {"cost", real(r.cost)},
              {"lambda", r.lambda},
              {"q", r.q},
              {"seed", r.seed},
              {"selected", r.selected},
              {"points", mat(r.points)},
              {"values", vec(r.values)},
              {"theta", vec(r.theta)},
              {"trace_U", r.trace_U},
              {"trace_UUt", r.trace_UUt}};
}

ScaleRecord scale_from_json(const json &j, Index dim) {
  ScaleRecord r;
  r.s = j.at("s").get<int>();
  r.epsilon = j.at("epsilon").get<double>();
  r.rank = j.at("rank").get<Index>();
  r.comp = j.at("comp").get<double>();
  r.cost = real_or_inf(j.at("cost"));
  r.lambda = j.at("lambda").get<std::vector<double>>();
  r.q = j.at("q").get<std::vector<int>>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.selected = j.at("selected").get<IndexList>();
  r.points = to_mat(j.at("points"), dim);
  r.values = to_vec(j.at("values"));
  r.theta = to_vec(j.at("theta"));
  r.trace_U = j.at("trace_U").get<double>();
  r.trace_UUt = j.at("trace_UUt").get<double>();
  return r;
}

} // namespace

std::string model_to_json(const ModelFile &file) {
  const SparseModel &m = file.model;
  json history = json::array();
  for (const auto &r : m.history)
    history.push_back(scale_json(r));

  const ModelParameters &p = file.parameters;
  json doc{
      {"schema_version", file.schema_version},
      {"parameters",
       {{"T", p.T_auto ? json("auto") : json(p.T)},
        {"M", p.M},
        {"phi", p.phi},
        {"k_extra", p.k_extra},
        {"seed", p.seed},
        {"max_scales", p.max_scales}}},
      {"provenance",
       {{"input_hash", file.provenance.input_hash},
        {"source", file.provenance.source},
        {"created", file.provenance.created ? json(*file.provenance.created)
                                            : json(nullptr)}}},
      {"model",
       {{"dim", m.dim()},
        {"n_train", m.n_train},
        {"T", m.T},
        {"t", m.t},
        {"epsilon_t", m.epsilon_t},
        {"cost", real(m.cost)},
        {"Q_t", m.Q_t},
        {"Lambda_t", m.Lambda_t},
        {"trace_U", m.trace_U},
        {"trace_UUt", m.trace_UUt},
        {"selected", m.selected},
        {"X_t", mat(m.X_t)},
        {"Y_t", vec(m.Y_t)},
        {"C_t", vec(m.C_t)},
        {"history", std::move(history)}}}};
  return doc.dump(1) + "\n";
}

ModelFile model_from_json(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception &e) {
    fail(ErrorCode::Parse, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    ModelFile file;
    file.schema_version = doc.at("schema_version").get<int>();
    if (file.schema_version != kModelSchemaVersion)
      fail(ErrorCode::Parse, "unsupported model schema_version " +
                                 std::to_string(file.schema_version));

    const json &p = doc.at("parameters");
    file.parameters.T_auto = p.at("T").is_string();
    file.parameters.T = file.parameters.T_auto ? 0.0 : p.at("T").get<double>();
    file.parameters.M = p.at("M").get<double>();
    file.parameters.phi = p.at("phi").get<double>();
    file.parameters.k_extra = p.at("k_extra").get<int>();
    file.parameters.seed = p.at("seed").get<std::uint64_t>();
    file.parameters.max_scales = p.at("max_scales").get<int>();

    const json &prov = doc.at("provenance");
    file.provenance.input_hash = prov.at("input_hash").get<std::string>();
    file.provenance.source = prov.at("source").get<std::string>();
    if (!prov.at("created").is_null())
      file.provenance.created = prov.at("created").get<std::string>();

    const json &m = doc.at("model");
    SparseModel &model = file.model;
    const Index dim = m.at("dim").get<Index>();
    if (dim < 1)
      fail(ErrorCode::Parse, "model dimension must be positive");
    model.n_train = m.at("n_train").get<Index>();
    model.T = m.at("T").get<double>();
    model.t = m.at("t").get<int>();
    model.epsilon_t = m.at("epsilon_t").get<double>();
    model.cost = real_or_inf(m.at("cost"));
    model.Q_t = m.at("Q_t").get<std::vector<int>>();
    model.Lambda_t = m.at("Lambda_t").get<std::vector<double>>();
    model.trace_U = m.at("trace_U").get<double>();
    model.trace_UUt = m.at("trace_UUt").get<double>();
    model.selected = m.at("selected").get<IndexList>();
    model.X_t = to_mat(m.at("X_t"), dim);
    model.Y_t = to_vec(m.at("Y_t"));
    model.C_t = to_vec(m.at("C_t"));
    for (const json &r : m.at("history"))
      model.history.push_back(scale_from_json(r, dim));

    if (model.C_t.size() != model.X_t.rows() ||
        model.Y_t.size() != model.X_t.rows() ||
        static_cast<Index>(model.selected.size()) != model.X_t.rows())
      fail(ErrorCode::Parse, "model file: sparse model arrays disagree in length");
    if (static_cast<Index>(model.Q_t.size()) != dim ||
        static_cast<Index>(model.Lambda_t.size()) != dim)
      fail(ErrorCode::Parse, "model file: Q_t and Lambda_t need one entry per dimension");
    return file;
  } catch (const json::exception &e) {
    fail(ErrorCode::Parse, std::string("model file: ") + e.what());
  }
}

void save_model(const ModelFile &file, const std::filesystem::path &path) {
  write_file(path, model_to_json(file));
}

ModelFile load_model(const std::filesystem::path &path) {
  try {
    return model_from_json(read_file(path));
  } catch (const Error &e) {
    if (e.code() == ErrorCode::Parse)
      fail(ErrorCode::Parse, path.string() + ": " + e.what());
    throw;
  }
}

// ---------------------------------------------------------------------------
// Reports

std::string report_table_csv(const SparseModel &model) {
  const Index d = model.dim();
  std::string out = "s,epsilon,rank,comp,cost";
  for (Index i = 1; i <= d; ++i)
    out += ",q" + std::to_string(i);
  for (Index i = 1; i <= d; ++i)
    out += ",lambda" + std::to_string(i);
  out += ",convergent\n";
  for (const auto &r : model.history) {
    out += std::to_string(r.s) + "," + format_real(r.epsilon) + "," +
           std::to_string(r.rank) + "," + format_real(r.comp) + "," +
           format_real(r.cost);
    for (Index i = 0; i < d; ++i)
      out += "," + (r.fitted() ? std::to_string(r.q[static_cast<std::size_t>(i)])
                               : std::string());
    for (Index i = 0; i < d; ++i)
      out += "," + (r.fitted() ? format_real(r.lambda[static_cast<std::size_t>(i)])
                               : std::string());
    out += r.s == model.t ? ",1\n" : ",0\n";
  }
  return out;
}

std::string report_summary(const SparseModel &model) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%3s %12s %7s %7s %12s  %s\n", "s",
                "epsilon", "rank", "comp", "cost", "Q / log10(lambda)");
  out += line;
  for (const auto &r : model.history) {
    std::string pen;
    for (std::size_t i = 0; i < r.q.size(); ++i)
      pen += (i ? " " : "") + std::to_string(r.q[i]) + "/" +
             format_real(std::round(std::log10(r.lambda[i]) * 1000.0) / 1000.0);
    std::snprintf(line, sizeof line, "%3d %12.5g %7lld %7.4f %12.5g  %s%s\n",
                  r.s, r.epsilon, static_cast<long long>(r.rank), r.comp,
                  r.cost, r.fitted() ? pen.c_str() : "unfit",
                  r.s == model.t ? "  <- convergence" : "");
    out += line;
  }
  std::snprintf(line, sizeof line,
                "convergence scale t = %d, %lld of %lld points kept\n", model.t,
                static_cast<long long>(model.size()),
                static_cast<long long>(model.n_train));
  out += line;
  return out;
}

std::string predictions_csv(const PredictionSet &set, bool with_intervals) {
  std::string out;
  if (with_intervals) {
    out += "# alpha=" + format_real(set.alpha) + "\n";
    out += "# df_res=" + format_real(set.df_res) + "\n";
    out += "# sigma2_hat=" + format_real(set.sigma2_hat) + "\n";
  }
  for (Index j = 0; j < set.X_m.cols(); ++j)
    out += "x" + std::to_string(j + 1) + ",";
  out += with_intervals ? "mean,std,lower,upper\n" : "mean\n";
  for (Index i = 0; i < set.X_m.rows(); ++i) {
    for (Index j = 0; j < set.X_m.cols(); ++j)
      out += format_real(set.X_m(i, j)) + ",";
    out += format_real(set.mean[i]);
    if (with_intervals)
      out += "," + format_real(set.std[i]) + "," + format_real(set.lower[i]) +
             "," + format_real(set.upper[i]);
    out += "\n";
  }
  return out;
}

} // namespace hrn
