#pragma once

#include <stdexcept>
#include <string>

namespace odelab {

// Every library failure surfaces as one of these codes so callers (and the
// command line tool) can map them to exit status without string matching.
enum class Err {
  DimMismatch,
  NotHermitian,
  NoConvergence,
  ImplicitNoConvergence,
  NotReducible,
  NotSkew,
  NotOrthogonal,
  NotUnitary,
  NotNormalized,
  BadPartition,
  UnsupportedSpec,
  SingularMatrix,
  OutOfRange,
  TooLarge,
  ZeroProjection,
  NonFinite,
  BadConfig,
  IoError,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Err code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace odelab
