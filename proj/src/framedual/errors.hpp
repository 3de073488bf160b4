#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace framedual {

enum class Errc {
  BadShape,           // empty matrix or fewer columns than rows
  NotAFrame,          // rank deficient (or nonfinite) element matrix
  DimensionMismatch,
  BadIndex,           // erasure index out of range, duplicated, or set not proper
  BadK,               // erasure cardinality outside [1, N-1]
  NotADual,           // duality residual above tolerance
  MrcViolated,
  MrcRetryExhausted,
  IoFailure,
  ParseError,
  InvalidArgument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::BadShape: return "bad_shape";
    case Errc::NotAFrame: return "not_a_frame";
    case Errc::DimensionMismatch: return "dimension_mismatch";
    case Errc::BadIndex: return "bad_index";
    case Errc::BadK: return "bad_k";
    case Errc::NotADual: return "not_a_dual";
    case Errc::MrcViolated: return "mrc_violated";
    case Errc::MrcRetryExhausted: return "mrc_retry_exhausted";
    case Errc::IoFailure: return "io_failure";
    case Errc::ParseError: return "parse_error";
    case Errc::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string what)
      : std::runtime_error(std::move(what)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace framedual
