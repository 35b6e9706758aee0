#include "hrn/hrn.h"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCompute = 2;

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(hrn_status status) {
  switch (status) {
  case HRN_OK:
    return kExitOk;
  case HRN_ERR_INPUT:
  case HRN_ERR_PARSE:
  case HRN_ERR_IO:
    return kExitUsage;
  default:
    return kExitCompute;
  }
}

void check(hrn_status status, const std::string &context) {
  if (status != HRN_OK)
    throw Failure{exit_code_for(status), context + ": " + hrn_last_error()};
}

[[noreturn]] void usage_error(const std::string &message) {
  throw Failure{kExitUsage, message};
}

struct DatasetDeleter {
  void operator()(hrn_dataset *p) const { hrn_dataset_free(p); }
};
struct ModelDeleter {
  void operator()(hrn_model *p) const { hrn_model_free(p); }
};
struct PointsDeleter {
  void operator()(hrn_points *p) const { hrn_points_free(p); }
};
using DatasetPtr = std::unique_ptr<hrn_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<hrn_model, ModelDeleter>;
using PointsPtr = std::unique_ptr<hrn_points, PointsDeleter>;

// A header is assumed when the first content line has a non-numeric cell.
bool detect_header(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    return false;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#')
      continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t+");
      const auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos)
        return true;
      double v = 0.0;
      const char *lo = cell.data() + b;
      const char *hi = cell.data() + e + 1;
      const auto res = std::from_chars(lo, hi, v);
      if (res.ec != std::errc{} || res.ptr != hi)
        return true;
    }
    return false;
  }
  return false;
}

struct InputFlags {
  std::string path;
  std::string header = "auto";

  bool has_header() const {
    if (header == "yes")
      return true;
    if (header == "no")
      return false;
    return detect_header(path);
  }
};

void add_header_flag(CLI::App *cmd, std::string &target) {
  cmd->add_option("--header", target, "Input files start with a header row")
      ->check(CLI::IsMember({"auto", "yes", "no"}))
      ->capture_default_str();
}

DatasetPtr read_dataset(const InputFlags &in) {
  hrn_dataset *raw = nullptr;
  check(hrn_dataset_read_csv(in.path.c_str(), in.has_header() ? 1 : 0, &raw),
        "reading " + in.path);
  return DatasetPtr(raw);
}

ModelPtr load_model(const std::string &path) {
  hrn_model *raw = nullptr;
  check(hrn_model_load(path.c_str(), &raw), "loading model " + path);
  return ModelPtr(raw);
}

// "lo:hi:count" per dimension, comma separated.
PointsPtr parse_grid(const std::string &spec, std::size_t dim) {
  std::vector<double> lo, hi;
  std::vector<std::size_t> counts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    double a = 0, b = 0;
    unsigned long c = 0;
    char tail = 0;
    if (std::sscanf(part.c_str(), "%lf:%lf:%lu%c", &a, &b, &c, &tail) != 3)
      usage_error("--grid expects lo:hi:count per dimension, got '" + part + "'");
    lo.push_back(a);
    hi.push_back(b);
    counts.push_back(c);
  }
  if (lo.size() != dim)
    usage_error("--grid has " + std::to_string(lo.size()) +
                " dimensions but the model has " + std::to_string(dim));
  hrn_points *raw = nullptr;
  check(hrn_points_grid(lo.data(), hi.data(), counts.data(), dim, &raw), "--grid");
  return PointsPtr(raw);
}

PointsPtr read_points(const InputFlags &in) {
  hrn_points *raw = nullptr;
  check(hrn_points_read_csv(in.path.c_str(), in.has_header() ? 1 : 0, &raw),
        "reading " + in.path);
  return PointsPtr(raw);
}

// Grid over the bounding box of every selected point in the history.
PointsPtr default_grid(const hrn_model *model) {
  const std::size_t d = hrn_model_dim(model);
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  const std::size_t l = hrn_model_size(model);
  std::vector<double> x(l * d);
  check(hrn_model_copy_sparse(model, x.data(), nullptr), "model");
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], x[i * d + j]);
      hi[j] = std::max(hi[j], x[i * d + j]);
    }
  std::vector<std::size_t> counts(d, d == 1 ? 1000 : (d == 2 ? 60 : 12));
  hrn_points *raw = nullptr;
  check(hrn_points_grid(lo.data(), hi.data(), counts.data(), d, &raw), "grid");
  return PointsPtr(raw);
}

struct FitFlags {
  InputFlags data;
  std::string synth;
  std::size_t n = 0;
  double noise = 0.0;
  std::string T = "auto";
  double M = 2.0;
  double phi = 1e-10;
  unsigned k_extra = 8;
  std::uint64_t seed = 0;
  unsigned max_scales = 25;
  std::string out;
  std::string report;
  std::string save_data;
  std::string created;
  bool quiet = false;
};

void run_synth(const FitFlags &f) {
  hrn_dataset *raw = nullptr;
  check(hrn_dataset_synth(f.synth.c_str(), f.n, f.noise, f.seed, &raw), "synth");
  DatasetPtr data(raw);
  check(hrn_dataset_write_csv(data.get(), f.out.c_str()), "writing " + f.out);
}

void run_fit(const FitFlags &f) {
  if (f.data.path.empty() == f.synth.empty())
    usage_error("fit needs exactly one of --data or --synth");

  DatasetPtr data;
  std::string source;
  if (!f.synth.empty()) {
    hrn_dataset *raw = nullptr;
    check(hrn_dataset_synth(f.synth.c_str(), f.n, f.noise, f.seed, &raw), "synth");
    data.reset(raw);
    std::ostringstream s;
    s << "synth:" << f.synth << " n=" << f.n << " noise=" << f.noise
      << " seed=" << f.seed;
    source = s.str();
  } else {
    data = read_dataset(f.data);
    source = f.data.path;
  }
  if (!f.save_data.empty())
    check(hrn_dataset_write_csv(data.get(), f.save_data.c_str()),
          "writing " + f.save_data);

  hrn_fit_options opts = hrn_fit_options_default();
  if (f.T != "auto") {
    try {
      std::size_t used = 0;
      opts.T = std::stod(f.T, &used);
      if (used != f.T.size() || !(opts.T > 0))
        throw std::invalid_argument("T");
    } catch (const std::exception &) {
      usage_error("--T expects 'auto' or a positive number, got '" + f.T + "'");
    }
  }
  opts.M = f.M;
  opts.phi = f.phi;
  opts.k_extra = f.k_extra;
  opts.seed = f.seed;
  opts.max_scales = f.max_scales;

  hrn_model *raw = nullptr;
  check(hrn_fit(data.get(), &opts, &raw), "fit");
  ModelPtr model(raw);
  check(hrn_model_save(model.get(), f.out.c_str(), source.c_str(),
                       f.created.empty() ? nullptr : f.created.c_str()),
        "writing " + f.out);
  if (!f.report.empty())
    check(hrn_write_report(model.get(), f.report.c_str()), "writing " + f.report);
  if (!f.quiet)
    std::cout << hrn_model_summary(model.get());
}

struct PredictFlags {
  std::string model;
  InputFlags query;
  std::string grid;
  std::optional<double> alpha;
  InputFlags data;
  std::string out;
  std::string out_dir;
};

PointsPtr query_points(const PredictFlags &f, const hrn_model *model,
                       bool required) {
  if (!f.query.path.empty() && !f.grid.empty())
    usage_error("use either --query or --grid, not both");
  if (!f.query.path.empty())
    return read_points(f.query);
  if (!f.grid.empty())
    return parse_grid(f.grid, hrn_model_dim(model));
  if (required)
    usage_error("predict needs --query FILE or --grid lo:hi:count[,...]");
  return default_grid(model);
}

void check_alpha(const std::optional<double> &alpha) {
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0))
    usage_error("--ci/--alpha must lie in (0, 1)");
}

void run_predict(const PredictFlags &f) {
  check_alpha(f.alpha);
  if (f.alpha && f.data.path.empty())
    usage_error("--ci needs the training data (--data FILE): the interval "
                "estimate rebuilds residuals and the influence matrix from the "
                "full dataset, which the sparse model does not contain. Mean "
                "prediction works from the model file alone.");
  ModelPtr model = load_model(f.model);
  PointsPtr pts = query_points(f, model.get(), true);
  DatasetPtr train;
  if (f.alpha)
    train = read_dataset(f.data);
  check(hrn_write_predictions(model.get(), train.get(), hrn_points_data(pts.get()),
                              hrn_points_size(pts.get()), hrn_points_dim(pts.get()),
                              f.alpha.value_or(0.05), f.out.c_str()),
        "predict");
}

void run_report(const PredictFlags &f) {
  check_alpha(f.alpha);
  ModelPtr model = load_model(f.model);
  if (hrn_model_scale_count(model.get()) == 0)
    usage_error("model file has no scale history to report");
  PointsPtr pts = query_points(f, model.get(), false);
  DatasetPtr train;
  if (!f.data.path.empty())
    train = read_dataset(f.data);
  check(hrn_write_plot_data(model.get(), train.get(), hrn_points_data(pts.get()),
                            hrn_points_size(pts.get()), hrn_points_dim(pts.get()),
                            f.alpha.value_or(0.05), f.out_dir.c_str()),
        "report");
  if (!f.out.empty())
    check(hrn_write_report(model.get(), f.out.c_str()), "writing " + f.out);
  std::cout << hrn_model_summary(model.get());
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Hierarchical regularization networks: sparse kernel models "
               "selected by generalized cross-validation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hrn_version()));

  FitFlags synth_flags;
  auto *synth = app.add_subcommand("synth", "Write a seeded synthetic benchmark dataset");
  synth->add_option("--family", synth_flags.synth, "schwefel1d or bohachevsky2d")->required();
  synth->add_option("--n", synth_flags.n, "Sample count")->required();
  synth->add_option("--noise", synth_flags.noise, "Gaussian noise standard deviation")->required();
  synth->add_option("--seed", synth_flags.seed, "RNG seed")->capture_default_str();
  synth->add_option("--out", synth_flags.out, "Output CSV")->required();

  FitFlags fit_flags;
  auto *fit = app.add_subcommand("fit", "Fit the scale hierarchy and save the sparse model");
  fit->add_option("--data", fit_flags.data.path, "Training CSV: feature columns then target");
  add_header_flag(fit, fit_flags.data.header);
  fit->add_option("--synth", fit_flags.synth, "Fit a synthetic family instead of --data");
  fit->add_option("--n", fit_flags.n, "Synthetic sample count");
  fit->add_option("--noise", fit_flags.noise, "Synthetic noise standard deviation");
  fit->add_option("--T", fit_flags.T, "Squared-distance scale, or 'auto' for diam^2/2")->capture_default_str();
  fit->add_option("--M", fit_flags.M, "Scale divisor")->capture_default_str();
  fit->add_option("--phi", fit_flags.phi, "Relative rank precision")->capture_default_str();
  fit->add_option("--k-extra", fit_flags.k_extra, "Sketch oversampling rows")->capture_default_str();
  fit->add_option("--seed", fit_flags.seed, "RNG seed (sketches and synthetic data)")->capture_default_str();
  fit->add_option("--max-scales", fit_flags.max_scales, "Upper bound on scales")->capture_default_str();
  fit->add_option("--out", fit_flags.out, "Model JSON")->required();
  fit->add_option("--report", fit_flags.report, "Per-scale CSV table");
  fit->add_option("--save-data", fit_flags.save_data, "Also write the training data as CSV");
  fit->add_option("--created", fit_flags.created, "Timestamp recorded in the model provenance");
  fit->add_flag("--quiet", fit_flags.quiet, "Do not print the scale summary");

  PredictFlags predict_flags;
  auto *predict = app.add_subcommand("predict", "Predict from a saved model");
  predict->add_option("--model", predict_flags.model, "Model JSON")->required();
  predict->add_option("--query", predict_flags.query.path, "Query CSV with feature columns only");
  add_header_flag(predict, predict_flags.query.header);
  predict->add_option("--grid", predict_flags.grid, "Tensor grid lo:hi:count per dimension, comma separated");
  predict->add_option("--ci,--alpha", predict_flags.alpha, "Add 1 - alpha confidence intervals");
  predict->add_option("--data", predict_flags.data.path, "Training CSV (required with --ci)");
  predict->add_option("--out", predict_flags.out, "Predictions CSV")->required();

  PredictFlags report_flags;
  auto *report = app.add_subcommand("report", "Write plot-ready CSV files for a saved model");
  report->add_option("--model", report_flags.model, "Model JSON")->required();
  report->add_option("--out-dir", report_flags.out_dir, "Output directory")->required();
  report->add_option("--out", report_flags.out, "Also write the per-scale table here");
  report->add_option("--query", report_flags.query.path, "Band sample points");
  add_header_flag(report, report_flags.query.header);
  report->add_option("--grid", report_flags.grid, "Band sample grid lo:hi:count per dimension");
  report->add_option("--data", report_flags.data.path, "Training CSV; enables interval bands");
  report->add_option("--alpha", report_flags.alpha, "Band confidence level is 1 - alpha");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  predict_flags.data.header = predict_flags.query.header;
  report_flags.data.header = report_flags.query.header;

  try {
    if (*synth)
      run_synth(synth_flags);
    else if (*fit)
      run_fit(fit_flags);
    else if (*predict)
      run_predict(predict_flags);
    else if (*report)
      run_report(report_flags);
  } catch (const Failure &f) {
    std::cerr << "hrn: " << f.message << "\n";
    return f.exit_code;
  }
  return kExitOk;
}
