#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "framedual/frame.hpp"

namespace framedual {

// A frame together with a verified dual: sum_n <h, x_n> z_n = h for all h,
// equivalently Z X^H = I.
template <class S>
struct DualPair {
  Frame<S> frame;
  MatrixX<S> dual;                 // r x N, column n = z_n
  bool is_canonical = false;
  double duality_residual = 0.0;   // ||Z X^H - I||_2 at verification time
  double condition_estimate = 0.0; // 1-norm condition estimate of the frame operator
  bool ill_conditioned = false;
};

// ||V X_sub^H - I||_2 where X_sub keeps the frame columns at `indices`.
// This is the reconstruction-defect metric used for every e-column of the
// benchmark: zero exactly when (v_n) is a dual of the (sub)frame.
template <class S>
double duality_error(const Frame<S>& frame, const MatrixX<S>& v,
                     const std::vector<Index>& indices) {
  require(v.rows() == frame.dim(), Errc::DimensionMismatch,
          "duality_error: row count mismatch");
  require(v.cols() == static_cast<Index>(indices.size()), Errc::DimensionMismatch,
          "duality_error: column count != index count");
  for (Index idx : indices)
    require(idx >= 0 && idx < frame.count(), Errc::BadIndex,
            "duality_error: index out of range");
  MatrixX<S> sub = select_columns(frame.elements(), indices);
  MatrixX<S> defect = v * sub.adjoint();
  defect.diagonal().array() -= S(1);
  return spectral_norm<S>(defect);
}

template <class S>
double duality_error(const Frame<S>& frame, const MatrixX<S>& v) {
  std::vector<Index> all(static_cast<size_t>(frame.count()));
  for (Index i = 0; i < frame.count(); ++i) all[static_cast<size_t>(i)] = i;
  return duality_error(frame, v, all);
}

// Largest columnwise relative deviation between two equally shaped
// matrices; columns that are both zero contribute nothing.
template <class S>
double max_colwise_rel_diff(const MatrixX<S>& a, const MatrixX<S>& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), Errc::DimensionMismatch,
          "columnwise comparison of unequal shapes");
  double worst = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    const double scale = std::max(a.col(j).norm(), b.col(j).norm());
    if (scale == 0.0) continue;
    worst = std::max(worst, (a.col(j) - b.col(j)).norm() / scale);
  }
  return worst;
}

// Canonical dual Y = S^{-1} X through a Cholesky solve of the Hermitian
// positive-definite frame operator (never an explicit inverse; the SVD
// route lives in pinv_dual).
template <class S>
DualPair<S> canonical_dual(const Frame<S>& frame,
                           double cond_limit = kDefaultCondLimit) {
  MatrixX<S> op = frame_operator(frame);
  Eigen::LLT<MatrixX<S>> llt(op);
  double cond = 0.0;
  MatrixX<S> dual;
  if (llt.info() == Eigen::Success) {
    const double rc = llt.rcond();
    cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    dual = llt.solve(frame.elements());
  } else {
    // Loss of positive definiteness at working precision; LDLT still yields
    // the solution, with the conditioning flagged below.
    Eigen::LDLT<MatrixX<S>> ldlt(op);
    const double rc = ldlt.rcond();
    cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    dual = ldlt.solve(frame.elements());
  }
  DualPair<S> pair{frame, std::move(dual), true, 0.0, cond, cond > cond_limit};
  pair.duality_residual = duality_error(frame, pair.dual);
  return pair;
}

namespace detail {

// Adjoint of the Moore-Penrose pseudoinverse of the synthesis matrix, via a
// thin SVD with MATLAB-style cutoff. This is the unit the benchmark times
// as the t3 baseline.
template <class S>
MatrixX<S> pinv_dual_matrix(const MatrixX<S>& x, double* cond_out = nullptr) {
  Eigen::BDCSVD<MatrixX<S>> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff =
      static_cast<double>(std::max(x.rows(), x.cols())) *
      std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv(0) : 0.0);
  VectorX<double> inv = VectorX<double>::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  if (cond_out)
    *cond_out = (sv.size() > 0 && sv(sv.size() - 1) > cutoff)
                    ? sv(0) / sv(sv.size() - 1)
                    : std::numeric_limits<double>::infinity();
  // X = U Sigma V^H  =>  (X^+)^H = U Sigma^+ V^H.
  return svd.matrixU() * inv.asDiagonal() * svd.matrixV().adjoint();
}

}  // namespace detail

// Canonical dual through the pseudoinverse route; must agree with
// canonical_dual up to rounding.
template <class S>
DualPair<S> pinv_dual(const Frame<S>& frame) {
  double cond = 0.0;
  MatrixX<S> dual = detail::pinv_dual_matrix<S>(frame.elements(), &cond);
  DualPair<S> pair{frame, std::move(dual), true, 0.0, cond, false};
  pair.duality_residual = duality_error(frame, pair.dual);
  return pair;
}

// Non-canonical dual Z = Y + W (I - P) with P = X^H S^{-1} X the orthogonal
// projection onto the range of the analysis operator and W a seeded Gaussian
// r x N matrix scaled by `spread`. Applied in factored form, so the N x N
// projection is never materialized. Deterministic per (seed, spread).
template <class S>
DualPair<S> random_dual(const DualPair<S>& canonical, std::uint64_t seed,
                        double spread, double dual_tol = kDefaultDualTol) {
  require(canonical.is_canonical, Errc::InvalidArgument,
          "random_dual starts from the canonical dual");
  const Frame<S>& frame = canonical.frame;
  const Index r = frame.dim();
  const Index n = frame.count();
  if (n == r) {
    // A basis has exactly one dual; W (I - P) vanishes identically.
    DualPair<S> pair = canonical;
    pair.is_canonical = false;
    return pair;
  }
  Rng rng = Rng::stream(seed, 0x6475616cULL);
  MatrixX<S> w(r, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < r; ++i) w(i, j) = S(spread) * rng.gaussian<S>();

  MatrixX<S> op = frame_operator(frame);
  Eigen::LLT<MatrixX<S>> llt(op);
  // W P = ((W X^H) S^{-1}) X = (S^{-1} (X W^H))^H X, using S = S^H.
  MatrixX<S> wp = llt.solve(frame.elements() * w.adjoint()).adjoint() *
                  frame.elements();
  DualPair<S> pair{frame, canonical.dual + w - wp, false, 0.0,
                   canonical.condition_estimate, canonical.ill_conditioned};
  pair.duality_residual = duality_error(frame, pair.dual);
  require(pair.duality_residual <= dual_tol, Errc::NotADual,
          "random dual failed verification (residual " +
              std::to_string(pair.duality_residual) + ")");
  return pair;
}

// Wrap an externally supplied dual matrix, verifying the duality identity.
// When detect_canonical is set, the pair is marked canonical if it matches
// S^{-1} X columnwise to a tight tolerance.
template <class S>
DualPair<S> attach_dual(const Frame<S>& frame, MatrixX<S> dual,
                        double dual_tol = kDefaultDualTol,
                        bool detect_canonical = true) {
  require(dual.rows() == frame.dim() && dual.cols() == frame.count(),
          Errc::DimensionMismatch, "dual matrix shape must match the frame");
  require(dual.allFinite(), Errc::NotADual, "dual matrix has nonfinite entries");
  const double residual = duality_error(frame, dual);
  require(residual <= dual_tol, Errc::NotADual,
          "duality residual " + std::to_string(residual) + " exceeds tolerance");
  DualPair<S> pair{frame, std::move(dual), false, residual, 0.0, false};
  if (detect_canonical) {
    DualPair<S> canon = canonical_dual(frame);
    pair.is_canonical = max_colwise_rel_diff<S>(pair.dual, canon.dual) <= 1e-10;
    pair.condition_estimate = canon.condition_estimate;
    pair.ill_conditioned = canon.ill_conditioned;
  }
  return pair;
}

}  // namespace framedual
