/* C interface to the hierarchical regularization network library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an hrn_status; on failure hrn_last_error()
 * describes the problem for the calling thread. Matrices are passed
 * row-major (one point per row).
 */
#ifndef HRN_H
#define HRN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HRN_BUILDING_LIBRARY)
#    define HRN_API __declspec(dllexport)
#  else
#    define HRN_API __declspec(dllimport)
#  endif
#else
#  define HRN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hrn_status {
  HRN_OK = 0,
  HRN_ERR_INPUT = 1,
  HRN_ERR_PARSE = 2,
  HRN_ERR_DEGENERATE_GEOMETRY = 3,
  HRN_ERR_ILL_CONDITIONED = 4,
  HRN_ERR_DEGENERATE_GCV = 5,
  HRN_ERR_SCALE_UNFIT = 6,
  HRN_ERR_FIT = 7,
  HRN_ERR_DEGENERATE_DOF = 8,
  HRN_ERR_IO = 9,
  HRN_ERR_INTERNAL = 10
} hrn_status;

typedef struct hrn_dataset hrn_dataset;
typedef struct hrn_model hrn_model;
typedef struct hrn_points hrn_points;

typedef struct hrn_fit_options {
  double T;            /* <= 0 selects the dataset diameter rule */
  double M;
  double phi;
  uint32_t k_extra;
  uint64_t seed;
  uint32_t max_scales;
} hrn_fit_options;

typedef struct hrn_scale_info {
  int32_t s;
  double epsilon;
  size_t rank;
  double comp;
  double cost;         /* +inf when the scale could not be fit */
} hrn_scale_info;

typedef struct hrn_interval_info {
  double df_res;
  double sigma2_hat;
  double t_value;
} hrn_interval_info;

HRN_API const char *hrn_version(void);
HRN_API const char *hrn_last_error(void);
HRN_API const char *hrn_status_string(hrn_status status);

/* Datasets */
HRN_API hrn_status hrn_dataset_create(const double *x, const double *y,
                                      size_t n, size_t d, hrn_dataset **out);
HRN_API hrn_status hrn_dataset_read_csv(const char *path, int has_header,
                                        hrn_dataset **out);
HRN_API hrn_status hrn_dataset_write_csv(const hrn_dataset *data,
                                         const char *path);
/* family: "schwefel1d" or "bohachevsky2d"; default ranges. */
HRN_API hrn_status hrn_dataset_synth(const char *family, size_t n,
                                     double noise_sigma, uint64_t seed,
                                     hrn_dataset **out);
HRN_API size_t hrn_dataset_size(const hrn_dataset *data);
HRN_API size_t hrn_dataset_dim(const hrn_dataset *data);
/* Copies n*d coordinates (row-major) and n targets; either may be NULL. */
HRN_API hrn_status hrn_dataset_copy(const hrn_dataset *data, double *x,
                                    double *y);
HRN_API void hrn_dataset_free(hrn_dataset *data);

/* Query point sets */
/* d feature columns per row, no target. */
HRN_API hrn_status hrn_points_read_csv(const char *path, int has_header,
                                       hrn_points **out);
/* Tensor grid: counts[i] points spanning [lo[i], hi[i]], first dimension
 * varying slowest. */
HRN_API hrn_status hrn_points_grid(const double *lo, const double *hi,
                                   const size_t *counts, size_t d,
                                   hrn_points **out);
HRN_API size_t hrn_points_size(const hrn_points *points);
HRN_API size_t hrn_points_dim(const hrn_points *points);
/* Row-major m x d view, valid until hrn_points_free. */
HRN_API const double *hrn_points_data(const hrn_points *points);
HRN_API void hrn_points_free(hrn_points *points);

/* Noise-free test function value; x has the family's dimension. */
HRN_API hrn_status hrn_synth_eval(const char *family, const double *x,
                                  double *out);

/* Fitting */
HRN_API hrn_fit_options hrn_fit_options_default(void);
HRN_API hrn_status hrn_fit(const hrn_dataset *data,
                           const hrn_fit_options *options, hrn_model **out);
HRN_API void hrn_model_free(hrn_model *model);

/* Model persistence. `source` and `created` may be NULL. */
HRN_API hrn_status hrn_model_save(const hrn_model *model, const char *path,
                                  const char *source, const char *created);
HRN_API hrn_status hrn_model_load(const char *path, hrn_model **out);

/* Model inspection */
HRN_API size_t hrn_model_dim(const hrn_model *model);
HRN_API size_t hrn_model_size(const hrn_model *model);
HRN_API int32_t hrn_model_convergence_scale(const hrn_model *model);
HRN_API double hrn_model_epsilon(const hrn_model *model);
HRN_API size_t hrn_model_scale_count(const hrn_model *model);
HRN_API hrn_status hrn_model_scale(const hrn_model *model, size_t index,
                                   hrn_scale_info *out);
/* Copies the l_t x d selected coordinates and l_t coefficients. */
HRN_API hrn_status hrn_model_copy_sparse(const hrn_model *model,
                                         double *x_t, double *c_t);

/* Prediction. Output arrays hold m values each. */
HRN_API hrn_status hrn_predict_mean(const hrn_model *model, const double *xq,
                                    size_t m, size_t d, double *mean);
HRN_API hrn_status hrn_predict_ci(const hrn_model *model,
                                  const hrn_dataset *train, const double *xq,
                                  size_t m, size_t d, double alpha,
                                  double *mean, double *std, double *lower,
                                  double *upper, hrn_interval_info *info);
HRN_API hrn_status hrn_t_quantile(double p, double df, double *out);

/* Reports and plot data. `train` may be NULL for mean-only output. */
HRN_API hrn_status hrn_write_report(const hrn_model *model, const char *path);
HRN_API const char *hrn_model_summary(const hrn_model *model);
HRN_API hrn_status hrn_write_predictions(const hrn_model *model,
                                         const hrn_dataset *train,
                                         const double *xq, size_t m, size_t d,
                                         double alpha, const char *path);
HRN_API hrn_status hrn_write_plot_data(const hrn_model *model,
                                       const hrn_dataset *train,
                                       const double *xq, size_t m, size_t d,
                                       double alpha, const char *directory);

#ifdef __cplusplus
}
#endif

#endif /* HRN_H */
