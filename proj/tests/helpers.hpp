#pragma once

#include <vector>

#include "framedual/dual.hpp"
#include "framedual/frame.hpp"

// Test-only oracles, kept independent of the code paths they check: the
// pseudoinverse here goes through a complete orthogonal decomposition (the
// library uses Cholesky and BDC-SVD), and the reconstruction sum is an
// explicit loop over entry-level inner products.

namespace testutil {

using framedual::Complex;
using framedual::Index;
using framedual::MatrixX;
using framedual::VectorX;

template <class S>
MatrixX<S> cod_pinv_dual(const MatrixX<S>& x) {
  Eigen::CompleteOrthogonalDecomposition<MatrixX<S>> cod(x);
  return cod.pseudoInverse().adjoint();
}

template <class S>
S slow_inner(const VectorX<S>& u, const VectorX<S>& v) {
  S acc{};
  for (Index i = 0; i < u.size(); ++i) acc += u(i) * Eigen::numext::conj(v(i));
  return acc;
}

// h_hat = sum_n <h, x_n> z_n, accumulated column by column.
template <class S>
VectorX<S> slow_reconstruct(const MatrixX<S>& x, const MatrixX<S>& z,
                            const VectorX<S>& h) {
  VectorX<S> out = VectorX<S>::Zero(h.size());
  for (Index n = 0; n < x.cols(); ++n) {
    VectorX<S> xn = x.col(n);
    out += slow_inner<S>(h, xn) * z.col(n);
  }
  return out;
}

template <class S>
VectorX<S> random_vector(framedual::Rng& rng, Index n) {
  VectorX<S> v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.gaussian<S>();
  return v;
}

// Columns e1, e1, e2 in R^2 (or C^2): the running small example.
template <class S>
MatrixX<S> e112() {
  MatrixX<S> m = MatrixX<S>::Zero(2, 3);
  m(0, 0) = S(1);
  m(0, 1) = S(1);
  m(1, 2) = S(1);
  return m;
}

template <class F>
framedual::Errc thrown_code(F&& body) {
  try {
    body();
  } catch (const framedual::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a framedual::Error");
}

}  // namespace testutil
