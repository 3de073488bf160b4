#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"

#include "framedual/erasure.hpp"
#include "framedual/frame.hpp"

namespace framedual {

// FRM1 text format.
//   line 1:  FRM1 <field> <rows> <cols>      field in {real, complex}
//   then <rows> lines of <cols> whitespace-separated entries.
// Complex entries are written as a+bi with no interior spaces. Values are
// printed with 17 significant digits, which round-trips doubles exactly.

inline std::string format_scalar(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_scalar(const Complex& v) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", v.real(), v.imag());
  return buf;
}

inline nlohmann::json scalar_to_json(double v) { return v; }
inline nlohmann::json scalar_to_json(const Complex& v) { return format_scalar(v); }

namespace detail {

inline bool parse_real_token(const std::string& tok, double& out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + tok.size() && end != begin;
}

inline bool parse_complex_token(const std::string& tok, Complex& out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double re = std::strtod(begin, &end);
  if (end == begin) return false;
  const char* mid = end;
  if (*mid != '+' && *mid != '-') return false;
  double im = std::strtod(mid, &end);
  if (end == mid || *end != 'i') return false;
  if (end + 1 != begin + tok.size()) return false;
  out = Complex(re, im);
  return true;
}

}  // namespace detail

template <class S>
void write_frm1(std::ostream& os, const MatrixX<S>& m) {
  os << "FRM1 " << field_name(field_of_v<S>) << ' ' << m.rows() << ' '
     << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_scalar(m(i, j));
    }
    os << '\n';
  }
}

template <class S>
void write_frm1_file(const std::string& path, const MatrixX<S>& m) {
  std::ofstream os(path);
  require(os.good(), Errc::IoFailure, "cannot open '" + path + "' for writing");
  write_frm1(os, m);
  os.flush();
  require(os.good(), Errc::IoFailure, "failed writing '" + path + "'");
}

// A parsed FRM1 matrix of either field.
using TypedMatrix = std::variant<MatrixX<double>, MatrixX<Complex>>;

inline Field typed_field(const TypedMatrix& m) {
  return std::holds_alternative<MatrixX<double>>(m) ? Field::Real : Field::Complex;
}

inline TypedMatrix read_frm1(std::istream& is, const std::string& origin = "<stream>") {
  auto parse_fail = [&](const std::string& why) -> void {
    fail(Errc::ParseError, origin + ": " + why);
  };
  std::string line;
  if (!std::getline(is, line)) parse_fail("empty input");
  std::istringstream header(line);
  std::string magic, field_str;
  long long rows = 0, cols = 0;
  if (!(header >> magic >> field_str >> rows >> cols) || magic != "FRM1")
    parse_fail("expected header 'FRM1 <field> <rows> <cols>'");
  if (rows < 1 || cols < 1) parse_fail("matrix dimensions must be positive");
  Field field = parse_field(field_str);

  auto read_into = [&](auto& m) {
    for (long long i = 0; i < rows; ++i) {
      if (!std::getline(is, line)) parse_fail("missing row " + std::to_string(i + 1));
      std::istringstream row(line);
      std::string tok;
      for (long long j = 0; j < cols; ++j) {
        if (!(row >> tok))
          parse_fail("row " + std::to_string(i + 1) + " has fewer than " +
                     std::to_string(cols) + " entries");
        bool ok;
        if constexpr (std::is_same_v<std::decay_t<decltype(m(0, 0))>, double>) {
          ok = detail::parse_real_token(tok, m(i, j));
        } else {
          ok = detail::parse_complex_token(tok, m(i, j));
        }
        if (!ok)
          parse_fail("bad entry '" + tok + "' at row " + std::to_string(i + 1) +
                     ", column " + std::to_string(j + 1));
      }
      if (row >> tok)
        parse_fail("row " + std::to_string(i + 1) + " has more than " +
                   std::to_string(cols) + " entries");
    }
    if (!m.allFinite()) parse_fail("nonfinite entry");
  };

  if (field == Field::Real) {
    MatrixX<double> m(rows, cols);
    read_into(m);
    return m;
  }
  MatrixX<Complex> m(rows, cols);
  read_into(m);
  return m;
}

inline TypedMatrix read_frm1_file(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), Errc::IoFailure, "cannot open '" + path + "' for reading");
  return read_frm1(is, path);
}

// Sidecar metadata written next to a reduced-dual FRM1 file.
template <class S>
nlohmann::json reduced_sidecar_json(const ReducedDual<S>& reduced,
                                    const ErasureSet& erasure) {
  nlohmann::json steps = nlohmann::json::array();
  for (const S& d : reduced.steps) steps.push_back(scalar_to_json(d));
  return nlohmann::json{{"method", method_name(reduced.method)},
                        {"erased_indices", erasure.erased_one_based()},
                        {"duality_residual", reduced.duality_residual},
                        {"steps", std::move(steps)}};
}

template <class S>
nlohmann::json reduce_result_json(const ReduceResult<S>& result) {
  nlohmann::json j{{"status", reduce_status_name(result.status)},
                   {"condition_estimate", result.condition_estimate},
                   {"condition_exceeded", result.condition_exceeded}};
  if (result.status == ReduceStatus::DenominatorVanishes) {
    j["fail_step"] = result.fail_step;
    j["denominator"] = scalar_to_json(result.denom_value);
  }
  if (result.ok()) j["duality_residual"] = result.dual->duality_residual;
  return j;
}

template <class S>
nlohmann::json equivalence_report_json(const EquivalenceReport<S>& report) {
  auto diff = [](double d) {
    return d < 0.0 ? nlohmann::json(nullptr) : nlohmann::json(d);
  };
  return nlohmann::json{
      {"methods",
       {{"iterative", reduce_result_json(report.iterative)},
        {"gram", reduce_result_json(report.gram)},
        {"operator", reduce_result_json(report.operator_inverse)}}},
      {"pairwise_max_rel_diff",
       {{"iterative_gram", diff(report.diff_iter_gram)},
        {"iterative_operator", diff(report.diff_iter_op)},
        {"gram_operator", diff(report.diff_gram_op)}}},
      {"tolerance", report.tol},
      {"all_equal", report.all_equal},
      {"anomaly", report.anomaly}};
}

}  // namespace framedual
