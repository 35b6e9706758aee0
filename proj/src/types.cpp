#include "hrn/error.hpp"
#include "hrn/rng.hpp"
#include "hrn/types.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hrn {

const char *to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::Input: return "input error";
  case ErrorCode::Parse: return "parse error";
  case ErrorCode::DegenerateGeometry: return "degenerate geometry";
  case ErrorCode::IllConditioned: return "ill-conditioned scale";
  case ErrorCode::DegenerateGcv: return "degenerate GCV";
  case ErrorCode::ScaleUnfit: return "scale unfit";
  case ErrorCode::Fit: return "fit error";
  case ErrorCode::DegenerateDof: return "degenerate degrees of freedom";
  case ErrorCode::Io: return "I/O error";
  case ErrorCode::Internal: return "internal error";
  }
  return "unknown error";
}

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    fail(ErrorCode::Input, "dataset needs at least one point and dimension");
  if (X.rows() != Y.size())
    fail(ErrorCode::Input, "dataset has " + std::to_string(X.rows()) +
                               " coordinate rows but " +
                               std::to_string(Y.size()) + " observations");
  if (!X.allFinite() || !Y.allFinite())
    fail(ErrorCode::Input, "dataset contains nonfinite values");
}

Matrix gather_rows(const Matrix &X, const IndexList &rows) {
  Matrix out(static_cast<Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Index>(r)) = X.row(rows[r]);
  return out;
}

Vector gather(const Vector &v, const IndexList &rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    out(static_cast<Index>(r)) = v(rows[r]);
  return out;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace hrn
