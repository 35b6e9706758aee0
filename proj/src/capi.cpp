#include "hrn/hrn.h"

#include "hrn/error.hpp"
#include "hrn/hierarchy.hpp"
#include "hrn/io.hpp"
#include "hrn/predict.hpp"
#include "hrn/student_t.hpp"
#include "hrn/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

struct hrn_dataset {
  hrn::Dataset D;
};

struct hrn_model {
  hrn::ModelFile file;
  mutable std::string summary;
};

struct hrn_points {
  std::vector<double> data;  // row-major
  std::size_t m = 0;
  std::size_t d = 0;
};

namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

thread_local std::string g_last_error;

hrn_status to_status(hrn::ErrorCode code) {
  using hrn::ErrorCode;
  switch (code) {
  case ErrorCode::Input: return HRN_ERR_INPUT;
  case ErrorCode::Parse: return HRN_ERR_PARSE;
  case ErrorCode::DegenerateGeometry: return HRN_ERR_DEGENERATE_GEOMETRY;
  case ErrorCode::IllConditioned: return HRN_ERR_ILL_CONDITIONED;
  case ErrorCode::DegenerateGcv: return HRN_ERR_DEGENERATE_GCV;
  case ErrorCode::ScaleUnfit: return HRN_ERR_SCALE_UNFIT;
  case ErrorCode::Fit: return HRN_ERR_FIT;
  case ErrorCode::DegenerateDof: return HRN_ERR_DEGENERATE_DOF;
  case ErrorCode::Io: return HRN_ERR_IO;
  case ErrorCode::Internal: return HRN_ERR_INTERNAL;
  }
  return HRN_ERR_INTERNAL;
}

template <class F> hrn_status guard(F &&body) {
  try {
    body();
    g_last_error.clear();
    return HRN_OK;
  } catch (const hrn::Error &e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc &) {
    g_last_error = "out of memory";
    return HRN_ERR_INTERNAL;
  } catch (const std::exception &e) {
    g_last_error = e.what();
    return HRN_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return HRN_ERR_INTERNAL;
  }
}

void require(bool ok, const char *what) {
  if (!ok)
    hrn::fail(hrn::ErrorCode::Input, what);
}

hrn::Matrix rows_to_matrix(const double *x, std::size_t m, std::size_t d) {
  require(x != nullptr || m == 0, "null point array");
  require(d > 0, "dimension must be positive");
  if (m == 0)
    return hrn::Matrix(0, static_cast<Eigen::Index>(d));
  return Eigen::Map<const RowMajor>(x, static_cast<Eigen::Index>(m),
                                    static_cast<Eigen::Index>(d));
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    hrn::fail(hrn::ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush())
    hrn::fail(hrn::ErrorCode::Io, "failed writing '" + path.string() + "'");
}

hrn::PredictionSet prediction_set(const hrn_model *model,
                                  const hrn_dataset *train, const double *xq,
                                  std::size_t m, std::size_t d, double alpha,
                                  bool &with_intervals) {
  require(model != nullptr, "null model");
  const hrn::Matrix X = rows_to_matrix(xq, m, d);
  with_intervals = train != nullptr;
  if (with_intervals)
    return hrn::predict_with_intervals(model->file.model, train->D, X, alpha);
  hrn::PredictionSet set;
  set.X_m = X;
  set.alpha = alpha;
  set.mean = hrn::predict_mean(model->file.model, X);
  return set;
}

} // namespace

extern "C" {

const char *hrn_version(void) { return "0.1.0"; }

const char *hrn_last_error(void) { return g_last_error.c_str(); }

const char *hrn_status_string(hrn_status status) {
  switch (status) {
  case HRN_OK: return "ok";
  case HRN_ERR_INPUT: return hrn::to_string(hrn::ErrorCode::Input);
  case HRN_ERR_PARSE: return hrn::to_string(hrn::ErrorCode::Parse);
  case HRN_ERR_DEGENERATE_GEOMETRY: return hrn::to_string(hrn::ErrorCode::DegenerateGeometry);
  case HRN_ERR_ILL_CONDITIONED: return hrn::to_string(hrn::ErrorCode::IllConditioned);
  case HRN_ERR_DEGENERATE_GCV: return hrn::to_string(hrn::ErrorCode::DegenerateGcv);
  case HRN_ERR_SCALE_UNFIT: return hrn::to_string(hrn::ErrorCode::ScaleUnfit);
  case HRN_ERR_FIT: return hrn::to_string(hrn::ErrorCode::Fit);
  case HRN_ERR_DEGENERATE_DOF: return hrn::to_string(hrn::ErrorCode::DegenerateDof);
  case HRN_ERR_IO: return hrn::to_string(hrn::ErrorCode::Io);
  case HRN_ERR_INTERNAL: return hrn::to_string(hrn::ErrorCode::Internal);
  }
  return "unknown status";
}

hrn_status hrn_dataset_create(const double *x, const double *y, size_t n,
                              size_t d, hrn_dataset **out) {
  return guard([&] {
    require(out != nullptr, "null output handle");
    require(y != nullptr || n == 0, "null target array");
    auto ds = std::make_unique<hrn_dataset>();
    ds->D.X = rows_to_matrix(x, n, d);
    ds->D.Y = Eigen::Map<const hrn::Vector>(y, static_cast<Eigen::Index>(n));
    ds->D.validate();
    *out = ds.release();
  });
}

hrn_status hrn_dataset_read_csv(const char *path, int has_header,
                                hrn_dataset **out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto ds = std::make_unique<hrn_dataset>();
    ds->D = hrn::ingest_csv(path, has_header != 0);
    *out = ds.release();
  });
}

hrn_status hrn_dataset_write_csv(const hrn_dataset *data, const char *path) {
  return guard([&] {
    require(data != nullptr && path != nullptr, "null argument");
    hrn::write_dataset_csv(data->D, path);
  });
}

hrn_status hrn_dataset_synth(const char *family, size_t n, double noise_sigma,
                             uint64_t seed, hrn_dataset **out) {
  return guard([&] {
    require(family != nullptr && out != nullptr, "null argument");
    const auto fam = hrn::parse_family(family);
    if (!fam)
      hrn::fail(hrn::ErrorCode::Input, std::string("unknown synthetic family '") +
                                           family +
                                           "' (expected schwefel1d or bohachevsky2d)");
    hrn::SynthSpec spec;
    spec.family = *fam;
    spec.n = static_cast<hrn::Index>(n);
    spec.noise_sigma = noise_sigma;
    spec.seed = seed;
    auto ds = std::make_unique<hrn_dataset>();
    ds->D = hrn::sample(spec);
    *out = ds.release();
  });
}

size_t hrn_dataset_size(const hrn_dataset *data) {
  return data ? static_cast<size_t>(data->D.size()) : 0;
}

size_t hrn_dataset_dim(const hrn_dataset *data) {
  return data ? static_cast<size_t>(data->D.dim()) : 0;
}

hrn_status hrn_dataset_copy(const hrn_dataset *data, double *x, double *y) {
  return guard([&] {
    require(data != nullptr, "null dataset");
    if (x) {
      Eigen::Map<RowMajor>(x, data->D.size(), data->D.dim()) = data->D.X;
    }
    if (y)
      Eigen::Map<hrn::Vector>(y, data->D.size()) = data->D.Y;
  });
}

void hrn_dataset_free(hrn_dataset *data) { delete data; }

hrn_status hrn_points_read_csv(const char *path, int has_header,
                               hrn_points **out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    const hrn::Matrix X = hrn::ingest_query_csv(path, has_header != 0);
    auto pts = std::make_unique<hrn_points>();
    pts->m = static_cast<size_t>(X.rows());
    pts->d = static_cast<size_t>(X.cols());
    pts->data.resize(pts->m * pts->d);
    Eigen::Map<RowMajor>(pts->data.data(), X.rows(), X.cols()) = X;
    *out = pts.release();
  });
}

hrn_status hrn_points_grid(const double *lo, const double *hi,
                           const size_t *counts, size_t d, hrn_points **out) {
  return guard([&] {
    require(lo && hi && counts && out, "null argument");
    require(d > 0, "grid dimension must be positive");
    size_t m = 1;
    for (size_t i = 0; i < d; ++i) {
      require(counts[i] >= 1, "grid counts must be positive");
      require(std::isfinite(lo[i]) && std::isfinite(hi[i]) && lo[i] <= hi[i],
              "grid bounds must be finite with lo <= hi");
      m *= counts[i];
    }
    auto pts = std::make_unique<hrn_points>();
    pts->m = m;
    pts->d = d;
    pts->data.resize(m * d);
    std::vector<size_t> k(d, 0);
    for (size_t r = 0; r < m; ++r) {
      for (size_t i = 0; i < d; ++i) {
        const double step =
            counts[i] > 1 ? (hi[i] - lo[i]) / static_cast<double>(counts[i] - 1) : 0.0;
        pts->data[r * d + i] =
            k[i] + 1 == counts[i] && counts[i] > 1 ? hi[i] : lo[i] + step * static_cast<double>(k[i]);
      }
      for (size_t i = d; i-- > 0;) {
        if (++k[i] < counts[i])
          break;
        k[i] = 0;
      }
    }
    *out = pts.release();
  });
}

size_t hrn_points_size(const hrn_points *points) { return points ? points->m : 0; }

size_t hrn_points_dim(const hrn_points *points) { return points ? points->d : 0; }

const double *hrn_points_data(const hrn_points *points) {
  return points ? points->data.data() : nullptr;
}

void hrn_points_free(hrn_points *points) { delete points; }

hrn_status hrn_synth_eval(const char *family, const double *x, double *out) {
  return guard([&] {
    require(family && x && out, "null argument");
    const auto fam = hrn::parse_family(family);
    if (!fam)
      hrn::fail(hrn::ErrorCode::Input, std::string("unknown synthetic family '") + family + "'");
    const auto dim = hrn::family_dim(*fam);
    *out = hrn::eval_true(*fam, Eigen::Map<const hrn::Vector>(x, dim));
  });
}

hrn_fit_options hrn_fit_options_default(void) {
  hrn_fit_options o;
  o.T = 0.0;
  o.M = hrn::kDefaultScaleDivisor;
  o.phi = hrn::kDefaultRankPrecision;
  o.k_extra = hrn::kDefaultSketchOversampling;
  o.seed = 0;
  o.max_scales = hrn::kDefaultMaxScales;
  return o;
}

hrn_status hrn_fit(const hrn_dataset *data, const hrn_fit_options *options,
                   hrn_model **out) {
  return guard([&] {
    require(data != nullptr && out != nullptr, "null argument");
    const hrn_fit_options o = options ? *options : hrn_fit_options_default();
    hrn::FitOptions fo;
    if (o.T > 0.0)
      fo.T = o.T;
    fo.M = o.M;
    fo.phi = o.phi;
    fo.k_extra = static_cast<int>(o.k_extra);
    fo.seed = o.seed;
    fo.max_scales = static_cast<int>(o.max_scales);

    auto model = std::make_unique<hrn_model>();
    model->file.model = hrn::fit(data->D, fo);
    auto &p = model->file.parameters;
    p.T_auto = !fo.T.has_value();
    p.T = model->file.model.T;
    p.M = fo.M;
    p.phi = fo.phi;
    p.k_extra = fo.k_extra;
    p.seed = fo.seed;
    p.max_scales = fo.max_scales;
    model->file.provenance.input_hash = hex16(hrn::dataset_hash(data->D));
    *out = model.release();
  });
}

void hrn_model_free(hrn_model *model) { delete model; }

hrn_status hrn_model_save(const hrn_model *model, const char *path,
                          const char *source, const char *created) {
  return guard([&] {
    require(model != nullptr && path != nullptr, "null argument");
    hrn::ModelFile file = model->file;
    if (source)
      file.provenance.source = source;
    if (created)
      file.provenance.created = std::string(created);
    hrn::save_model(file, path);
  });
}

hrn_status hrn_model_load(const char *path, hrn_model **out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto model = std::make_unique<hrn_model>();
    model->file = hrn::load_model(path);
    *out = model.release();
  });
}

size_t hrn_model_dim(const hrn_model *model) {
  return model ? static_cast<size_t>(model->file.model.dim()) : 0;
}

size_t hrn_model_size(const hrn_model *model) {
  return model ? static_cast<size_t>(model->file.model.size()) : 0;
}

int32_t hrn_model_convergence_scale(const hrn_model *model) {
  return model ? model->file.model.t : -1;
}

double hrn_model_epsilon(const hrn_model *model) {
  return model ? model->file.model.epsilon_t
               : std::numeric_limits<double>::quiet_NaN();
}

size_t hrn_model_scale_count(const hrn_model *model) {
  return model ? model->file.model.history.size() : 0;
}

hrn_status hrn_model_scale(const hrn_model *model, size_t index,
                           hrn_scale_info *out) {
  return guard([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto &h = model->file.model.history;
    require(index < h.size(), "scale index out of range");
    const auto &r = h[index];
    out->s = r.s;
    out->epsilon = r.epsilon;
    out->rank = static_cast<size_t>(r.rank);
    out->comp = r.comp;
    out->cost = r.cost;
  });
}

hrn_status hrn_model_copy_sparse(const hrn_model *model, double *x_t,
                                 double *c_t) {
  return guard([&] {
    require(model != nullptr, "null model");
    const auto &m = model->file.model;
    if (x_t)
      Eigen::Map<RowMajor>(x_t, m.size(), m.dim()) = m.X_t;
    if (c_t)
      Eigen::Map<hrn::Vector>(c_t, m.size()) = m.C_t;
  });
}

hrn_status hrn_predict_mean(const hrn_model *model, const double *xq, size_t m,
                            size_t d, double *mean) {
  return guard([&] {
    require(model != nullptr && mean != nullptr, "null argument");
    const hrn::Vector P = hrn::predict_mean(model->file.model, rows_to_matrix(xq, m, d));
    Eigen::Map<hrn::Vector>(mean, P.size()) = P;
  });
}

hrn_status hrn_predict_ci(const hrn_model *model, const hrn_dataset *train,
                          const double *xq, size_t m, size_t d, double alpha,
                          double *mean, double *std, double *lower,
                          double *upper, hrn_interval_info *info) {
  return guard([&] {
    require(model != nullptr, "null model");
    if (train == nullptr)
      hrn::fail(hrn::ErrorCode::Input,
                "confidence intervals need the full training data; the sparse "
                "model alone only supports mean prediction");
    const hrn::PredictionSet set = hrn::predict_with_intervals(
        model->file.model, train->D, rows_to_matrix(xq, m, d), alpha);
    const auto n = set.mean.size();
    if (mean) Eigen::Map<hrn::Vector>(mean, n) = set.mean;
    if (std) Eigen::Map<hrn::Vector>(std, n) = set.std;
    if (lower) Eigen::Map<hrn::Vector>(lower, n) = set.lower;
    if (upper) Eigen::Map<hrn::Vector>(upper, n) = set.upper;
    if (info) {
      info->df_res = set.df_res;
      info->sigma2_hat = set.sigma2_hat;
      info->t_value = hrn::t_quantile(1.0 - alpha / 2.0, set.df_res);
    }
  });
}

hrn_status hrn_t_quantile(double p, double df, double *out) {
  return guard([&] {
    require(out != nullptr, "null output");
    *out = hrn::t_quantile(p, df);
  });
}

hrn_status hrn_write_report(const hrn_model *model, const char *path) {
  return guard([&] {
    require(model != nullptr && path != nullptr, "null argument");
    write_text(path, hrn::report_table_csv(model->file.model));
  });
}

const char *hrn_model_summary(const hrn_model *model) {
  if (!model)
    return "";
  model->summary = hrn::report_summary(model->file.model);
  return model->summary.c_str();
}

hrn_status hrn_write_predictions(const hrn_model *model,
                                 const hrn_dataset *train, const double *xq,
                                 size_t m, size_t d, double alpha,
                                 const char *path) {
  return guard([&] {
    require(path != nullptr, "null path");
    bool with_intervals = false;
    const auto set = prediction_set(model, train, xq, m, d, alpha, with_intervals);
    write_text(path, hrn::predictions_csv(set, with_intervals));
  });
}

hrn_status hrn_write_plot_data(const hrn_model *model, const hrn_dataset *train,
                               const double *xq, size_t m, size_t d,
                               double alpha, const char *directory) {
  return guard([&] {
    require(model != nullptr && directory != nullptr, "null argument");
    const auto &sm = model->file.model;
    if (sm.history.empty())
      hrn::fail(hrn::ErrorCode::Input, "model file has no scale history");
    const std::filesystem::path dir(directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
      hrn::fail(hrn::ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());

    std::string curve = "s,epsilon,rank,comp,cost,convergent\n";
    for (const auto &r : sm.history) {
      curve += std::to_string(r.s) + "," + hrn::format_real(r.epsilon) + "," +
               std::to_string(r.rank) + "," + hrn::format_real(r.comp) + "," +
               hrn::format_real(r.cost) + (r.s == sm.t ? ",1\n" : ",0\n");

      std::string pts;
      for (hrn::Index j = 0; j < sm.dim(); ++j)
        pts += "x" + std::to_string(j + 1) + ",";
      pts += "y\n";
      for (hrn::Index i = 0; i < r.points.rows(); ++i) {
        for (hrn::Index j = 0; j < r.points.cols(); ++j)
          pts += hrn::format_real(r.points(i, j)) + ",";
        pts += hrn::format_real(r.values[i]) + "\n";
      }
      write_text(dir / ("selected_s" + std::to_string(r.s) + ".csv"), pts);
    }
    write_text(dir / "cost_curve.csv", curve);

    if (xq != nullptr && m > 0) {
      bool with_intervals = false;
      const auto set = prediction_set(model, train, xq, m, d, alpha, with_intervals);
      write_text(dir / "prediction_band.csv", hrn::predictions_csv(set, with_intervals));
    }
  });
}

} // extern "C"
