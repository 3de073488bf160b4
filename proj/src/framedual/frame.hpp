#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <utility>
#include <vector>

#include "framedual/errors.hpp"
#include "framedual/rng.hpp"
#include "framedual/scalar.hpp"

namespace framedual {

using Index = Eigen::Index;

template <class S>
using MatrixX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VectorX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using RowVectorX = Eigen::Matrix<S, 1, Eigen::Dynamic>;

// Inner product <u, v> = sum_i u_i conj(v_i): linear in the first slot,
// conjugate-linear in the second. Eigen's dot conjugates its *first*
// argument, hence the swap.
template <class S>
inline S inner(const VectorX<S>& u, const VectorX<S>& v) {
  return v.dot(u);
}

template <class S>
std::vector<double> singular_values(const MatrixX<S>& m) {
  if (m.rows() == 0 || m.cols() == 0) return {};
  Eigen::BDCSVD<MatrixX<S>> svd(m);
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

// Count of singular values exceeding rank_tol * sigma_max.
template <class S>
Index numerical_rank(const MatrixX<S>& m, double rank_tol = kDefaultRankTol) {
  auto sv = singular_values<S>(m);
  if (sv.empty() || sv.front() == 0.0) return 0;
  const double cutoff = rank_tol * sv.front();
  return static_cast<Index>(
      std::count_if(sv.begin(), sv.end(), [&](double s) { return s > cutoff; }));
}

// Largest singular value, computed exactly (SVD), not estimated.
template <class S>
double spectral_norm(const MatrixX<S>& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::BDCSVD<MatrixX<S>> svd(m);
  return svd.singularValues()(0);
}

// Extract columns at the given positions, preserving their order.
template <class S>
MatrixX<S> select_columns(const MatrixX<S>& m, const std::vector<Index>& cols) {
  MatrixX<S> out(m.rows(), static_cast<Index>(cols.size()));
  for (Index j = 0; j < out.cols(); ++j) out.col(j) = m.col(cols[static_cast<size_t>(j)]);
  return out;
}

struct FrameBounds {
  double lower = 0.0;  // smallest eigenvalue of the frame operator
  double upper = 0.0;  // largest eigenvalue of the frame operator
};

// A finite frame for C^r (or R^r): N >= r vectors spanning the space,
// stored as the columns of an r x N matrix. Spanning is verified at
// construction, so a Frame value is a frame by construction.
template <class S>
class Frame {
 public:
  Index dim() const { return elements_.rows(); }
  Index count() const { return elements_.cols(); }
  const MatrixX<S>& elements() const { return elements_; }
  static constexpr Field field() { return field_of_v<S>; }

 private:
  explicit Frame(MatrixX<S> elements) : elements_(std::move(elements)) {}
  template <class T>
  friend Frame<T> make_frame(MatrixX<T> elements, double rank_tol);

  MatrixX<S> elements_;
};

template <class S>
Frame<S> make_frame(MatrixX<S> elements, double rank_tol = kDefaultRankTol) {
  const Index r = elements.rows();
  const Index n = elements.cols();
  require(r >= 1 && n >= 1, Errc::BadShape, "frame matrix must be nonempty");
  require(n >= r, Errc::BadShape,
          "frame needs at least as many elements as the dimension (got " +
              std::to_string(n) + " columns for dimension " + std::to_string(r) + ")");
  require(elements.allFinite(), Errc::NotAFrame, "frame matrix has nonfinite entries");
  const Index rank = numerical_rank<S>(elements, rank_tol);
  require(rank == r, Errc::NotAFrame,
          "columns do not span the space (numerical rank " + std::to_string(rank) +
              " < dimension " + std::to_string(r) + ")");
  return Frame<S>(std::move(elements));
}

// Gaussian random frame; retries with derived seeds on the (measure-zero)
// chance the sample is rank deficient.
template <class S>
Frame<S> random_frame(Index dim, Index count, std::uint64_t seed,
                      double rank_tol = kDefaultRankTol) {
  require(dim >= 1 && count >= dim, Errc::BadShape,
          "random frame needs count >= dim >= 1");
  for (int attempt = 0; attempt < 10; ++attempt) {
    Rng rng = Rng::stream(seed, 0x66726d65ULL + static_cast<std::uint64_t>(attempt));
    MatrixX<S> m(dim, count);
    for (Index j = 0; j < count; ++j)
      for (Index i = 0; i < dim; ++i) m(i, j) = rng.gaussian<S>();
    try {
      return make_frame<S>(std::move(m), rank_tol);
    } catch (const Error&) {
      continue;
    }
  }
  fail(Errc::NotAFrame, "failed to sample a full-rank random frame");
}

// Coefficient map h -> (<h, x_n>)_n. As a matrix this is X^H.
template <class S>
VectorX<S> analysis(const Frame<S>& frame, const VectorX<S>& h) {
  require(h.size() == frame.dim(), Errc::DimensionMismatch,
          "analysis: vector length " + std::to_string(h.size()) +
              " != dimension " + std::to_string(frame.dim()));
  require(h.allFinite(), Errc::DimensionMismatch, "analysis: nonfinite input");
  return frame.elements().adjoint() * h;
}

// Adjoint map (c_n) -> sum_n c_n x_n.
template <class S>
VectorX<S> synthesis(const Frame<S>& frame, const VectorX<S>& coeffs) {
  require(coeffs.size() == frame.count(), Errc::DimensionMismatch,
          "synthesis: coefficient length " + std::to_string(coeffs.size()) +
              " != element count " + std::to_string(frame.count()));
  require(coeffs.allFinite(), Errc::DimensionMismatch, "synthesis: nonfinite input");
  return frame.elements() * coeffs;
}

// S = X X^H, Hermitian positive definite for any frame.
template <class S>
MatrixX<S> frame_operator(const Frame<S>& frame) {
  return frame.elements() * frame.elements().adjoint();
}

// Optimal frame bounds: extreme eigenvalues of the frame operator.
template <class S>
FrameBounds frame_bounds(const Frame<S>& frame) {
  MatrixX<S> op = frame_operator(frame);
  Eigen::SelfAdjointEigenSolver<MatrixX<S>> es(op, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return FrameBounds{ev(0), ev(ev.size() - 1)};
}

}  // namespace framedual
