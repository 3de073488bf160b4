#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "framedual/erasure.hpp"
#include "framedual/frm_io.hpp"

namespace framedual {

// Uniformly random k-subset of {0,...,n-1}, ascending; deterministic per
// seed (Floyd's sampling).
inline ErasureSet random_erasure(Index n, Index k, std::uint64_t seed) {
  require(n >= 2, Errc::BadK, "random erasure needs at least two indices");
  require(k >= 1 && k < n, Errc::BadK,
          "erasure cardinality must satisfy 1 <= k < N (got k=" +
              std::to_string(k) + ", N=" + std::to_string(n) + ")");
  Rng rng = Rng::stream(seed, 0x65726173ULL);
  std::vector<Index> chosen;
  chosen.reserve(static_cast<size_t>(k));
  auto contains = [&](Index v) {
    return std::find(chosen.begin(), chosen.end(), v) != chosen.end();
  };
  for (Index i = n - k; i < n; ++i) {
    Index t = static_cast<Index>(rng.below(i + 1));
    chosen.push_back(contains(t) ? i : t);
  }
  std::sort(chosen.begin(), chosen.end());
  return ErasureSet(n, std::move(chosen));
}

enum class TransmitStatus { Recovered, MrcViolated, ConstructionFailed };

inline const char* transmit_status_name(TransmitStatus s) {
  switch (s) {
    case TransmitStatus::Recovered: return "recovered";
    case TransmitStatus::MrcViolated: return "mrc_violated";
    case TransmitStatus::ConstructionFailed: return "construction_failed";
  }
  return "unknown";
}

struct TransmissionReport {
  double signal_norm = 0.0;
  std::vector<std::int64_t> erased;  // 1-based
  Method method = Method::Iterative;
  bool mrc_ok = false;
  TransmitStatus status = TransmitStatus::MrcViolated;
  double recon_error_rel = 0.0;      // meaningful iff status == Recovered
  ReduceStatus failure_kind = ReduceStatus::Ok;
  int failure_step = 0;
  std::string failure_detail;

  nlohmann::json to_json() const {
    nlohmann::json j{{"signal_norm", signal_norm},
                     {"erased", erased},
                     {"method", method_name(method)},
                     {"mrc_ok", mrc_ok},
                     {"status", transmit_status_name(status)}};
    if (status == TransmitStatus::Recovered) j["recon_error_rel"] = recon_error_rel;
    if (status == TransmitStatus::ConstructionFailed) {
      j["failure"] = {{"kind", reduce_status_name(failure_kind)},
                      {"detail", failure_detail}};
      if (failure_kind == ReduceStatus::DenominatorVanishes)
        j["failure"]["step"] = failure_step;
    }
    return j;
  }
};

// One end-to-end run: analyze the signal, drop the erased coefficients,
// rebuild a dual of the surviving family, reconstruct. Every failure mode
// lands in the report status; nothing is thrown for math-level failures.
template <class S>
TransmissionReport transmit(const DualPair<S>& pair, const ErasureSet& erasure,
                            const VectorX<S>& signal, Method method,
                            const Tolerances& tols = {}) {
  TransmissionReport report;
  report.erased = erasure.erased_one_based();
  report.method = method;
  report.signal_norm = signal.norm();

  VectorX<S> coeffs = analysis(pair.frame, signal);  // erased entries unused below
  report.mrc_ok = mrc_check(pair.frame, erasure, tols.rank_tol);
  if (!report.mrc_ok) {
    report.status = TransmitStatus::MrcViolated;
    return report;
  }
  ReduceResult<S> result = reduce(pair, erasure, method, tols);
  if (!result.ok()) {
    report.status = TransmitStatus::ConstructionFailed;
    report.failure_kind = result.status;
    report.failure_step = result.fail_step;
    report.failure_detail = result.describe();
    return report;
  }
  VectorX<S> recovered = reconstruct(*result.dual, pair.frame, coeffs);
  VectorX<S> defect = recovered - signal;
  const double abs_err = defect.norm();
  const double rel = report.signal_norm > 0.0 ? abs_err / report.signal_norm : abs_err;
  if (!std::isfinite(rel)) {
    report.status = TransmitStatus::ConstructionFailed;
    report.failure_kind = result.status;
    report.failure_detail = "nonfinite reconstruction";
    return report;
  }
  report.status = TransmitStatus::Recovered;
  report.recon_error_rel = rel;
  return report;
}

}  // namespace framedual
