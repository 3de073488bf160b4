#pragma once

#include "framedual/dual.hpp"

namespace framedual {

// Frame (e1, e1, e1, e2, ..., e_r) in dimension r (so N = r + 2).
template <class S>
Frame<S> tripled_basis_frame(Index dim, double rank_tol = kDefaultRankTol) {
  require(dim >= 2, Errc::BadShape, "tripled basis frame needs dimension >= 2");
  MatrixX<S> m = MatrixX<S>::Zero(dim, dim + 2);
  m(0, 0) = S(1);
  m(0, 1) = S(1);
  m(0, 2) = S(1);
  for (Index i = 1; i < dim; ++i) m(i, i + 2) = S(1);
  return make_frame<S>(std::move(m), rank_tol);
}

// The non-canonical dual (e1, -e1/2, e1/2, e2, ..., e_r) of the tripled
// basis frame. Erasing index 1 keeps the MRC, yet <z_1, x_1> = 1, so the
// erasure Gram matrix is zero, the reduction operator kills e1, and the
// iterative denominator vanishes at step 1 -- all three constructions fail.
template <class S>
DualPair<S> tripled_basis_counterexample(Index dim,
                                         double rank_tol = kDefaultRankTol) {
  Frame<S> frame = tripled_basis_frame<S>(dim, rank_tol);
  MatrixX<S> dual = MatrixX<S>::Zero(dim, dim + 2);
  dual(0, 0) = S(1);
  dual(0, 1) = S(-0.5);
  dual(0, 2) = S(0.5);
  for (Index i = 1; i < dim; ++i) dual(i, i + 2) = S(1);
  return attach_dual<S>(frame, std::move(dual), kDefaultDualTol,
                        /*detect_canonical=*/false);
}

}  // namespace framedual
