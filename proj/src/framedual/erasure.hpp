#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "framedual/dual.hpp"
#include "framedual/frame.hpp"

namespace framedual {

// A nonempty proper subset E of {0,...,N-1} marking erased coefficients.
// The stored order of the erased indices is the traversal order of the
// iterative construction (E_j = first j entries); the complement is kept
// ascending.
class ErasureSet {
 public:
  ErasureSet(Index total, std::vector<Index> erased)
      : total_(total), erased_(std::move(erased)) {
    require(total_ >= 1, Errc::InvalidArgument, "erasure set needs a positive total");
    require(!erased_.empty(), Errc::BadIndex, "erasure set must be nonempty");
    require(static_cast<Index>(erased_.size()) < total_, Errc::BadIndex,
            "erasure set must be a proper subset (cannot erase everything)");
    std::vector<bool> seen(static_cast<size_t>(total_), false);
    for (Index idx : erased_) {
      require(idx >= 0 && idx < total_, Errc::BadIndex,
              "erased index " + std::to_string(idx + 1) + " out of range 1.." +
                  std::to_string(total_));
      require(!seen[static_cast<size_t>(idx)], Errc::BadIndex,
              "erased index " + std::to_string(idx + 1) + " repeated");
      seen[static_cast<size_t>(idx)] = true;
    }
    complement_.reserve(static_cast<size_t>(total_) - erased_.size());
    for (Index i = 0; i < total_; ++i)
      if (!seen[static_cast<size_t>(i)]) complement_.push_back(i);
  }

  static ErasureSet from_one_based(Index total, const std::vector<std::int64_t>& ones) {
    std::vector<Index> zero;
    zero.reserve(ones.size());
    for (auto v : ones) zero.push_back(static_cast<Index>(v) - 1);
    return ErasureSet(total, std::move(zero));
  }

  Index total() const { return total_; }
  Index k() const { return static_cast<Index>(erased_.size()); }
  const std::vector<Index>& erased() const { return erased_; }
  const std::vector<Index>& complement() const { return complement_; }

  std::vector<std::int64_t> erased_one_based() const {
    std::vector<std::int64_t> out;
    out.reserve(erased_.size());
    for (Index idx : erased_) out.push_back(static_cast<std::int64_t>(idx) + 1);
    return out;
  }

 private:
  Index total_;
  std::vector<Index> erased_;
  std::vector<Index> complement_;
};

// Minimal redundancy condition: the surviving columns still span the space.
template <class S>
bool mrc_check(const Frame<S>& frame, const ErasureSet& erasure,
               double rank_tol = kDefaultRankTol) {
  require(erasure.total() == frame.count(), Errc::DimensionMismatch,
          "erasure set sized for a different frame");
  if (frame.count() - erasure.k() < frame.dim()) return false;
  MatrixX<S> kept = select_columns(frame.elements(), erasure.complement());
  return numerical_rank<S>(kept, rank_tol) == frame.dim();
}

// The k x k matrix with entries <z_{E[j]}, x_{E[i]}> - delta_ij whose
// invertibility governs the Gram-solve construction.
template <class S>
struct ErasureGram {
  MatrixX<S> matrix;
  double condition_estimate = 0.0;
};

namespace detail {

template <class S>
Eigen::PartialPivLU<MatrixX<S>> lu_with_cond(MatrixX<S> m, double& cond_out) {
  Eigen::PartialPivLU<MatrixX<S>> lu(std::move(m));
  const double rc = lu.rcond();
  cond_out = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  return lu;
}

}  // namespace detail

template <class S>
ErasureGram<S> erasure_gram(const DualPair<S>& pair, const ErasureSet& erasure) {
  require(erasure.total() == pair.frame.count(), Errc::DimensionMismatch,
          "erasure set sized for a different frame");
  MatrixX<S> xe = select_columns(pair.frame.elements(), erasure.erased());
  MatrixX<S> ze = select_columns(pair.dual, erasure.erased());
  MatrixX<S> a = xe.adjoint() * ze;
  a.diagonal().array() -= S(1);
  double cond = 0.0;
  detail::lu_with_cond<S>(a, cond);
  return ErasureGram<S>{std::move(a), cond};
}

enum class Method { Iterative, GramSolve, OperatorInverse };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Iterative: return "iterative";
    case Method::GramSolve: return "gram";
    case Method::OperatorInverse: return "operator";
  }
  return "unknown";
}

// A dual of the reduced frame (x_n)_{n in E^c}, with provenance.
template <class S>
struct ReducedDual {
  std::vector<Index> indices;    // the complement E^c, ascending
  MatrixX<S> vectors;            // r x (N-k), column j = v_{indices[j]}
  Method method = Method::GramSolve;
  std::vector<S> steps;          // iterative denominators 1 - <v_j^{j-1}, x_j>
  double duality_residual = 0.0;
};

enum class ReduceStatus { Ok, SingularGram, SingularOperator, DenominatorVanishes };

inline const char* reduce_status_name(ReduceStatus s) {
  switch (s) {
    case ReduceStatus::Ok: return "ok";
    case ReduceStatus::SingularGram: return "singular_gram";
    case ReduceStatus::SingularOperator: return "singular_operator";
    case ReduceStatus::DenominatorVanishes: return "denominator_vanishes";
  }
  return "unknown";
}

template <class S>
struct ReduceResult {
  ReduceStatus status = ReduceStatus::Ok;
  int fail_step = 0;               // 1-based step for DenominatorVanishes
  S denom_value{};                 // offending denominator
  double condition_estimate = 0.0; // of A_{X,Z,E} or of the reduction operator
  bool condition_exceeded = false;
  std::optional<ReducedDual<S>> dual;

  bool ok() const { return status == ReduceStatus::Ok; }
  std::string describe() const {
    switch (status) {
      case ReduceStatus::Ok: return "ok";
      case ReduceStatus::SingularGram:
        return "erasure Gram matrix is numerically singular";
      case ReduceStatus::SingularOperator:
        return "reduction operator is numerically singular";
      case ReduceStatus::DenominatorVanishes:
        return "denominator vanished at step " + std::to_string(fail_step);
    }
    return "unknown";
  }
};

// Observer for the iterative construction: called after step j with the
// current family (v_n^j) for n in E_j^c and their original column indices.
template <class S>
using StepObserver =
    std::function<void(int step, const MatrixX<S>& active_dual,
                       const std::vector<Index>& active_indices)>;

namespace detail {

template <class S>
struct RawReduction {
  ReduceStatus status = ReduceStatus::Ok;
  int fail_step = 0;
  S denom_value{};
  double condition_estimate = 0.0;
  MatrixX<S> vectors;     // r x (N-k) in complement order (valid when Ok)
  std::vector<S> steps;
};

// Gram-solve construction: factor A_{X,Z,E} once, solve for all N-k
// right-hand sides, then v_n = z_n - sum_i alpha_{ni} z_{E[i]}.
template <class S>
RawReduction<S> run_gram(const MatrixX<S>& x, const MatrixX<S>& z,
                         const ErasureSet& erasure) {
  RawReduction<S> out;
  MatrixX<S> xe = select_columns(x, erasure.erased());
  MatrixX<S> ze = select_columns(z, erasure.erased());
  MatrixX<S> zc = select_columns(z, erasure.complement());
  MatrixX<S> a = xe.adjoint() * ze;
  a.diagonal().array() -= S(1);
  auto lu = lu_with_cond<S>(a, out.condition_estimate);
  if (!(lu.rcond() > kSingularRcond)) {
    out.status = ReduceStatus::SingularGram;
    return out;
  }
  MatrixX<S> rhs = xe.adjoint() * zc;                // k x (N-k), entries <z_n, x_{E[i]}>
  MatrixX<S> alpha = lu.solve(rhs);
  const double rhs_norm = rhs.norm();
  const double resid = (a * alpha - rhs).norm();
  if (!alpha.allFinite() ||
      (rhs_norm > 0.0 && resid > kSingularResidual * rhs_norm)) {
    out.status = ReduceStatus::SingularGram;
    return out;
  }
  out.vectors = zc - ze * alpha;
  return out;
}

// Operator construction: T = I - sum_i z_{E[i]} x_{E[i]}^H materialized as
// an r x r matrix, one general LU solve per surviving column (batched).
template <class S>
RawReduction<S> run_operator(const MatrixX<S>& x, const MatrixX<S>& z,
                             const ErasureSet& erasure) {
  RawReduction<S> out;
  MatrixX<S> xe = select_columns(x, erasure.erased());
  MatrixX<S> ze = select_columns(z, erasure.erased());
  MatrixX<S> zc = select_columns(z, erasure.complement());
  MatrixX<S> t = MatrixX<S>::Identity(x.rows(), x.rows()) - ze * xe.adjoint();
  auto lu = lu_with_cond<S>(t, out.condition_estimate);
  if (!(lu.rcond() > kSingularRcond)) {
    out.status = ReduceStatus::SingularOperator;
    return out;
  }
  MatrixX<S> v = lu.solve(zc);
  const double rhs_norm = zc.norm();
  const double resid = (t * v - zc).norm();
  if (!v.allFinite() || (rhs_norm > 0.0 && resid > kSingularResidual * rhs_norm)) {
    out.status = ReduceStatus::SingularOperator;
    return out;
  }
  out.vectors = std::move(v);
  return out;
}

// Iterative construction: one rank-one update of the surviving columns per
// erased index. Columns are permuted to [erased..., complement...] so the
// active family at step j is the contiguous right block.
template <class S>
RawReduction<S> run_iterative(const MatrixX<S>& x, const MatrixX<S>& z,
                              const ErasureSet& erasure, double denom_tol,
                              const StepObserver<S>& observer = {}) {
  RawReduction<S> out;
  const Index n = x.cols();
  const Index k = erasure.k();
  std::vector<Index> perm = erasure.erased();
  perm.insert(perm.end(), erasure.complement().begin(), erasure.complement().end());
  MatrixX<S> work = select_columns(z, perm);
  out.steps.reserve(static_cast<size_t>(k));
  for (Index j = 1; j <= k; ++j) {
    const auto xj = x.col(erasure.erased()[static_cast<size_t>(j - 1)]);
    const auto pivot = work.col(j - 1);               // v_{E[j]}^{j-1}
    const S denom = S(1) - xj.dot(pivot);             // 1 - <v_j^{j-1}, x_j>
    out.steps.push_back(denom);
    if (!(std::abs(denom) > denom_tol)) {
      out.status = ReduceStatus::DenominatorVanishes;
      out.fail_step = static_cast<int>(j);
      out.denom_value = denom;
      return out;
    }
    auto active = work.rightCols(n - j);
    RowVectorX<S> coeffs = (xj.adjoint() * active) / denom;  // alpha_n^j
    active.noalias() += pivot * coeffs;
    if (observer) {
      std::vector<Index> active_indices(perm.begin() + j, perm.end());
      observer(static_cast<int>(j), MatrixX<S>(active), active_indices);
    }
  }
  out.vectors = work.rightCols(n - k);
  return out;
}

template <class S>
ReduceResult<S> finalize(RawReduction<S> raw, Method method,
                         const DualPair<S>& pair, const ErasureSet& erasure,
                         double cond_limit) {
  ReduceResult<S> result;
  result.status = raw.status;
  result.fail_step = raw.fail_step;
  result.denom_value = raw.denom_value;
  result.condition_estimate = raw.condition_estimate;
  result.condition_exceeded = raw.condition_estimate > cond_limit;
  if (raw.status == ReduceStatus::Ok) {
    ReducedDual<S> dual;
    dual.indices = erasure.complement();
    dual.vectors = std::move(raw.vectors);
    dual.method = method;
    dual.steps = std::move(raw.steps);
    dual.duality_residual = duality_error(pair.frame, dual.vectors, dual.indices);
    result.dual = std::move(dual);
  }
  return result;
}

}  // namespace detail

template <class S>
ReduceResult<S> reduced_dual_gram(const DualPair<S>& pair, const ErasureSet& erasure,
                                  double cond_limit = kDefaultCondLimit) {
  require(erasure.total() == pair.frame.count(), Errc::DimensionMismatch,
          "erasure set sized for a different frame");
  return detail::finalize(detail::run_gram(pair.frame.elements(), pair.dual, erasure),
                          Method::GramSolve, pair, erasure, cond_limit);
}

template <class S>
ReduceResult<S> reduced_dual_iterative(const DualPair<S>& pair,
                                       const ErasureSet& erasure,
                                       double denom_tol = kDefaultDenomTol,
                                       const StepObserver<S>& observer = {},
                                       double cond_limit = kDefaultCondLimit) {
  require(erasure.total() == pair.frame.count(), Errc::DimensionMismatch,
          "erasure set sized for a different frame");
  return detail::finalize(
      detail::run_iterative(pair.frame.elements(), pair.dual, erasure, denom_tol,
                            observer),
      Method::Iterative, pair, erasure, cond_limit);
}

template <class S>
ReduceResult<S> reduced_dual_operator(const DualPair<S>& pair,
                                      const ErasureSet& erasure,
                                      double cond_limit = kDefaultCondLimit) {
  require(erasure.total() == pair.frame.count(), Errc::DimensionMismatch,
          "erasure set sized for a different frame");
  return detail::finalize(
      detail::run_operator(pair.frame.elements(), pair.dual, erasure),
      Method::OperatorInverse, pair, erasure, cond_limit);
}

template <class S>
ReduceResult<S> reduce(const DualPair<S>& pair, const ErasureSet& erasure,
                       Method method, const Tolerances& tols = {}) {
  switch (method) {
    case Method::Iterative:
      return reduced_dual_iterative(pair, erasure, tols.denom_tol, {}, tols.cond_limit);
    case Method::GramSolve:
      return reduced_dual_gram(pair, erasure, tols.cond_limit);
    case Method::OperatorInverse:
      return reduced_dual_operator(pair, erasure, tols.cond_limit);
  }
  fail(Errc::InvalidArgument, "unknown construction method");
}

// Cross-check of the three constructions on one input. Failures are data
// here, not errors; `anomaly` marks the combination the theory rules out
// (iterative succeeded while a solve-based construction did not).
template <class S>
struct EquivalenceReport {
  ReduceResult<S> iterative;
  ReduceResult<S> gram;
  ReduceResult<S> operator_inverse;
  double tol = 1e-8;
  // Pairwise max columnwise relative differences; negative = not comparable.
  double diff_iter_gram = -1.0;
  double diff_iter_op = -1.0;
  double diff_gram_op = -1.0;
  bool all_equal = false;
  bool anomaly = false;
};

template <class S>
EquivalenceReport<S> equivalence_check(const DualPair<S>& pair,
                                       const ErasureSet& erasure,
                                       double tol = 1e-8,
                                       const Tolerances& tols = {}) {
  EquivalenceReport<S> report;
  report.tol = tol;
  report.iterative =
      reduced_dual_iterative(pair, erasure, tols.denom_tol, {}, tols.cond_limit);
  report.gram = reduced_dual_gram(pair, erasure, tols.cond_limit);
  report.operator_inverse = reduced_dual_operator(pair, erasure, tols.cond_limit);

  auto diff = [](const ReduceResult<S>& a, const ReduceResult<S>& b) {
    return max_colwise_rel_diff<S>(a.dual->vectors, b.dual->vectors);
  };
  int successes = 0;
  for (const auto* r : {&report.iterative, &report.gram, &report.operator_inverse})
    if (r->ok()) ++successes;
  if (report.iterative.ok() && report.gram.ok())
    report.diff_iter_gram = diff(report.iterative, report.gram);
  if (report.iterative.ok() && report.operator_inverse.ok())
    report.diff_iter_op = diff(report.iterative, report.operator_inverse);
  if (report.gram.ok() && report.operator_inverse.ok())
    report.diff_gram_op = diff(report.gram, report.operator_inverse);

  if (successes == 0) {
    report.all_equal = false;
  } else {
    report.all_equal = true;
    for (double d : {report.diff_iter_gram, report.diff_iter_op, report.diff_gram_op})
      if (d >= 0.0 && d > tol) report.all_equal = false;
  }
  report.anomaly = report.iterative.ok() &&
                   !(report.gram.ok() && report.operator_inverse.ok());
  return report;
}

// Recovery from surviving coefficients: h = sum_{n in E^c} c_n v_n.
// Entries of `coeffs` at erased positions are ignored.
template <class S>
VectorX<S> reconstruct(const ReducedDual<S>& reduced, const Frame<S>& frame,
                       const VectorX<S>& coeffs) {
  require(coeffs.size() == frame.count(), Errc::DimensionMismatch,
          "reconstruct: coefficient vector length != frame element count");
  require(reduced.vectors.rows() == frame.dim(), Errc::DimensionMismatch,
          "reconstruct: reduced dual built for a different dimension");
  VectorX<S> kept(static_cast<Index>(reduced.indices.size()));
  for (Index j = 0; j < kept.size(); ++j)
    kept(j) = coeffs(reduced.indices[static_cast<size_t>(j)]);
  return reduced.vectors * kept;
}

}  // namespace framedual
