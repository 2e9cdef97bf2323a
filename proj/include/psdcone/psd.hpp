#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "psdcone/linalg.hpp"

namespace psdcone {

/// Hermitian positive semidefinite matrix with a certified rank.
template <BackendScalar S>
class PsdOperator {
 public:
  PsdOperator() = default;

  /// Validates `m`; throws NotPsd otherwise. Approx inputs are replaced by
  /// their Hermitian part after validation.
  explicit PsdOperator(Matrix<S> m, const Tolerance& tol = {}) {
    if (!m.is_square()) throw NotPsd("PsdOperator: matrix is not square");
    if constexpr (is_exact_v<S>) {
      const auto r = is_hermitian(m) ? detail::ldl_psd_rank(m) : std::nullopt;
      if (!r) throw NotPsd("PsdOperator: matrix is not Hermitian PSD");
      rank_ = *r;
    } else {
      // One eigendecomposition serves the PSD test and the rank (|lambda| = sigma).
      if (!is_hermitian(m, tol)) throw NotPsd("PsdOperator: matrix is not Hermitian PSD");
      m = hermitian_part(m);
      const auto e = eigh(m);
      const std::size_t n = m.rows();
      const double norm = n ? e.values.cwiseAbs().maxCoeff() : 0.0;
      const double thr = tol.threshold(n, n, norm);
      if (n && e.values(0) < -thr) throw NotPsd("PsdOperator: matrix is not Hermitian PSD");
      rank_ = 0;
      for (Eigen::Index i = 0; i < e.values.size(); ++i) rank_ += std::abs(e.values(i)) > thr;
    }
    m_ = std::move(m);
  }

  static PsdOperator zero(std::size_t n) { return PsdOperator(Matrix<S>(n, n)); }
  static PsdOperator identity(std::size_t n) { return PsdOperator(Matrix<S>::identity(n)); }

  const Matrix<S>& matrix() const { return m_; }
  std::size_t dim() const { return m_.rows(); }
  std::size_t rank() const { return rank_; }

  friend bool operator==(const PsdOperator& a, const PsdOperator& b) { return a.m_ == b.m_; }

 private:
  Matrix<S> m_;
  std::size_t rank_ = 0;
};

template <BackendScalar To, BackendScalar From>
PsdOperator<To> convert(const PsdOperator<From>& a, const Tolerance& tol = {}) {
  if constexpr (std::same_as<To, From>) {
    return a;
  } else {
    return PsdOperator<To>(convert<To>(a.matrix()), tol);
  }
}

/// ran A; equals ran A^{1/2} in finite dimension.
template <BackendScalar S>
Subspace<S> range(const PsdOperator<S>& a, const Tolerance& tol = {}) {
  if constexpr (is_exact_v<S>) {
    return column_space(a.matrix(), tol);
  } else {
    // Eigenvectors scaled by lambda_i / lambda_max, as column_space does with
    // singular vectors.
    const auto e = eigh(a.matrix());
    const std::size_t n = a.dim();
    const double top = n ? e.values.cwiseAbs().maxCoeff() : 0.0;
    const double thr = tol.threshold(n, n, top);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = e.values.size() - 1; i >= 0; --i)
      if (std::abs(e.values(i)) > thr) keep.push_back(i);
    std::stable_sort(keep.begin(), keep.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return std::abs(e.values(x)) > std::abs(e.values(y)); });
    ApproxMatrix b(n, keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j)
      for (std::size_t i = 0; i < n; ++i)
        b(i, j) = e.vectors(static_cast<Eigen::Index>(i), keep[j]) * (std::abs(e.values(keep[j])) / top);
    return Subspace<S>(n, std::move(b));
  }
}

/// Positive square root via the Hermitian eigendecomposition. Eigenvalues
/// at or below the tolerance are clamped to zero so the rank is preserved.
template <BackendScalar S>
PsdOperator<S> psd_sqrt(const PsdOperator<S>& a, const Tolerance& tol = {}) {
  if constexpr (is_exact_v<S>) {
    throw BackendError("psd_sqrt: square roots are not available on the exact backend");
  } else {
    const std::size_t n = a.dim();
    if (n == 0) return a;
    const auto e = eigh(a.matrix());
    const double top = std::max(0.0, e.values(e.values.size() - 1));
    const double thr = tol.threshold(n, n, top);
    Eigen::VectorXd root(n);
    for (std::size_t i = 0; i < n; ++i) root(i) = e.values(i) > thr ? std::sqrt(e.values(i)) : 0.0;
    Eigen::MatrixXcd s = e.vectors * root.asDiagonal() * e.vectors.adjoint();
    return PsdOperator<S>(detail::from_eigen(s), tol);
  }
}

/// Minimal-norm X with b^{1/2} X = a^{1/2}. Exists iff ran a ⊆ ran b.
template <BackendScalar S>
Matrix<S> douglas_factor(const PsdOperator<S>& a, const PsdOperator<S>& b, const Tolerance& tol = {}) {
  if constexpr (is_exact_v<S>) {
    throw BackendError("douglas_factor: square roots are not available on the exact backend");
  } else {
    require_same_dim(a.dim(), b.dim(), "douglas_factor");
    if (!subspace_contains(range(b, tol), range(a, tol), tol))
      throw NoFactor("douglas_factor: ran a is not contained in ran b");
    const auto ra = psd_sqrt(a, tol).matrix();
    const auto rb = psd_sqrt(b, tol).matrix();
    return pinv(rb, tol) * ra;
  }
}

/// f f*.
template <BackendScalar S>
PsdOperator<S> rank_one(std::span<const S> f) {
  const auto col = Matrix<S>::column(f);
  if (col.is_zero()) throw InvalidArgument("rank_one: zero vector");
  return PsdOperator<S>(col * col.adjoint());
}

template <BackendScalar S>
PsdOperator<S> rank_one(std::initializer_list<S> f) {
  return rank_one<S>(std::span<const S>(f.begin(), f.size()));
}

}  // namespace psdcone
