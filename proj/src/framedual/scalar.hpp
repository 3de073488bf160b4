#pragma once

#include <complex>
#include <string_view>
#include <type_traits>

#include "framedual/errors.hpp"

namespace framedual {

using Complex = std::complex<double>;

enum class Field { Real, Complex };

inline const char* field_name(Field f) {
  return f == Field::Real ? "real" : "complex";
}

inline Field parse_field(std::string_view s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  fail(Errc::ParseError, "unknown field '" + std::string(s) + "' (expected real or complex)");
}

template <class S>
inline constexpr bool is_complex_v = std::is_same_v<S, Complex>;

template <class S>
inline constexpr Field field_of_v = is_complex_v<S> ? Field::Complex : Field::Real;

// Tolerance knobs shared across the library; every default is overridable
// per call and from the CLI.
struct Tolerances {
  double rank_tol = 1e-10;   // relative: sigma_i > rank_tol * sigma_max counts toward rank
  double dual_tol = 1e-9;    // absolute bound on the spectral-norm duality residual
  double denom_tol = 1e-12;  // iterative step requires |1 - <v_j, x_j>| above this
  double cond_limit = 1e12;  // condition estimates above this set a warning flag
};

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kDefaultDualTol = 1e-9;
inline constexpr double kDefaultDenomTol = 1e-12;
inline constexpr double kDefaultCondLimit = 1e12;

// Relative threshold below which a solve is declared numerically singular
// (reciprocal condition estimate) together with the residual guard used by
// the Gram and operator constructions.
inline constexpr double kSingularRcond = 1e-12;
inline constexpr double kSingularResidual = 1e-6;

}  // namespace framedual
