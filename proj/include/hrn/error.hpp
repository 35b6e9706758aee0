#pragma once

#include <stdexcept>
#include <string>

namespace hrn {

enum class ErrorCode {
  Input,               // malformed or nonfinite caller input
  Parse,               // CSV / model file syntax
  DegenerateGeometry,  // all points coincide
  IllConditioned,      // penalized normal equations not factorizable
  DegenerateGcv,       // tr(I - U) == 0
  ScaleUnfit,          // no (Q, Lambda) candidate produced a finite GCV
  Fit,                 // every scale failed
  DegenerateDof,       // residual degrees of freedom <= 0
  Io,
  Internal,
};

const char *to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) {
  throw Error(code, what);
}

} // namespace hrn
