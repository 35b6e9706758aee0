#pragma once

#include "hrn/hierarchy.hpp"
#include "hrn/predict.hpp"
#include "hrn/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace hrn {

inline constexpr int kModelSchemaVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

/// Rows of d feature columns followed by one target column. Empty lines are
/// skipped. Errors cite the 1-based data row (header excluded), the file
/// line and the column.
Dataset ingest_csv(const std::filesystem::path &path, bool has_header);
Dataset parse_csv(const std::string &text, bool has_header);

/// Header "x1,...,xd,y" then full-precision rows; ingest_csv(.., true)
/// reproduces the dataset exactly.
void write_dataset_csv(const Dataset &D, const std::filesystem::path &path);

/// Feature-only query file (no target column).
Matrix ingest_query_csv(const std::filesystem::path &path, bool has_header);

/// FNV-1a over n, d and the raw IEEE bytes of X and Y.
std::uint64_t dataset_hash(const Dataset &D);

/// Fit parameters echoed into the model file.
struct ModelParameters {
  double T = 0.0;
  bool T_auto = true;
  double M = 2.0;
  double phi = 1e-10;
  int k_extra = 8;
  std::uint64_t seed = 0;
  int max_scales = 25;
};

struct ModelProvenance {
  std::string input_hash;  // 16 hex digits
  std::string source;      // input file name or synth description
  std::optional<std::string> created;
};

struct ModelFile {
  int schema_version = kModelSchemaVersion;
  SparseModel model;
  ModelParameters parameters;
  ModelProvenance provenance;
};

std::string model_to_json(const ModelFile &file);
ModelFile model_from_json(const std::string &text);
void save_model(const ModelFile &file, const std::filesystem::path &path);
ModelFile load_model(const std::filesystem::path &path);

/// Per-scale table: s, epsilon, l, comp, cost, q_i, lambda_i, convergent.
std::string report_table_csv(const SparseModel &model);
/// Plain-text version of the same table for terminals.
std::string report_summary(const SparseModel &model);

/// Predictions as CSV: x1..xd, mean and, when intervals are present, std,
/// lower, upper. Interval metadata goes into leading '#' comment lines.
std::string predictions_csv(const PredictionSet &set, bool with_intervals);

} // namespace hrn
