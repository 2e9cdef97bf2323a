#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "psdcone/error.hpp"
#include "psdcone/matrix.hpp"
#include "psdcone/scalar.hpp"

namespace psdcone {

namespace detail {

inline Eigen::MatrixXcd to_eigen(const ApproxMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline ApproxMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ApproxMatrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

struct Svd {
  Eigen::MatrixXcd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXcd v;
  double sigma_max() const { return sigma.size() ? sigma(0) : 0.0; }
};

inline Svd full_svd(const ApproxMatrix& m) {
  Svd s;
  if (m.rows() == 0 || m.cols() == 0) {
    s.u = Eigen::MatrixXcd::Identity(m.rows(), m.rows());
    s.v = Eigen::MatrixXcd::Identity(m.cols(), m.cols());
    s.sigma = Eigen::VectorXd(0);
    return s;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m), Eigen::ComputeFullU | Eigen::ComputeFullV);
  s.u = svd.matrixU();
  s.v = svd.matrixV();
  s.sigma = svd.singularValues();
  return s;
}

inline std::size_t numerical_rank(const Svd& s, std::size_t rows, std::size_t cols,
                                  const Tolerance& tol) {
  const double thr = tol.threshold(rows, cols, s.sigma_max());
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.sigma.size(); ++i)
    if (s.sigma(i) > thr) ++r;
  return r;
}

/// Scaled leading left singular vectors U_k * diag(sigma_i / sigma_1). Keeps
/// the relative weight of each direction while staying scale-free.
inline ApproxMatrix scaled_basis(const Svd& s, std::size_t k) {
  const std::size_t n = s.u.rows();
  ApproxMatrix b(n, k);
  if (k == 0) return b;
  const double s1 = s.sigma(0);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) b(i, j) = s.u(i, j) * (s.sigma(j) / s1);
  return b;
}

struct Rref {
  ExactMatrix r;
  std::vector<std::size_t> pivots;
};

/// Reduced row echelon form over the Gaussian rationals.
inline Rref rref(ExactMatrix m) {
  Rref out;
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
    std::size_t p = row;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    const Exact inv = Exact(1) / m(row, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, c).is_zero()) continue;
      const Exact f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) {
        if (m(row, j).is_zero()) continue;
        add_product(m(i, j), f, m(row, j), true);
      }
    }
    out.pivots.push_back(c);
    ++row;
  }
  out.r = std::move(m);
  return out;
}

/// Pivot columns of the row echelon form, by fraction-free (Bareiss)
/// elimination over the Gaussian integers. Each row is first cleared of
/// denominators; row scaling leaves the column dependencies unchanged.
inline std::vector<std::size_t> echelon_pivots(const ExactMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<mpz_class> re(rows * cols), im(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < cols; ++j) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).re().get_den_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).im().get_den_mpz_t());
    }
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& x = m(i, j);
      re[i * cols + j] = x.re().get_num() * (l / x.re().get_den());
      im[i * cols + j] = x.im().get_num() * (l / x.im().get_den());
    }
  }
  auto zero = [&](std::size_t k) { return sgn(re[k]) == 0 && sgn(im[k]) == 0; };
  std::vector<std::size_t> pivots;
  mpz_class prev_re = 1, prev_im = 0, norm = 1, pr, pi, xr, xi, t;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < rows; ++c) {
    std::size_t p = row;
    while (p < rows && zero(p * cols + c)) ++p;
    if (p == rows) continue;
    if (p != row)
      for (std::size_t j = c; j < cols; ++j) {
        std::swap(re[p * cols + j], re[row * cols + j]);
        std::swap(im[p * cols + j], im[row * cols + j]);
      }
    pr = re[row * cols + c];
    pi = im[row * cols + c];
    const bool unit = prev_re == 1 && sgn(prev_im) == 0;
    for (std::size_t i = row + 1; i < rows; ++i) {
      const mpz_class fr = re[i * cols + c], fi = im[i * cols + c];
      for (std::size_t j = c + 1; j < cols; ++j) {
        const std::size_t k = i * cols + j, r = row * cols + j;
        // x = piv * a(i,j) - f * a(row,j)
        xr = pr * re[k] - pi * im[k];
        xr -= fr * re[r] - fi * im[r];
        xi = pr * im[k] + pi * re[k];
        xi -= fr * im[r] + fi * re[r];
        if (unit) {
          re[k] = xr;
          im[k] = xi;
        } else {
          // exact division by prev: x conj(prev) / |prev|^2
          t = xr * prev_re + xi * prev_im;
          mpz_divexact(re[k].get_mpz_t(), t.get_mpz_t(), norm.get_mpz_t());
          t = xi * prev_re - xr * prev_im;
          mpz_divexact(im[k].get_mpz_t(), t.get_mpz_t(), norm.get_mpz_t());
        }
      }
      re[i * cols + c] = 0;
      im[i * cols + c] = 0;
    }
    prev_re = pr;
    prev_im = pi;
    norm = pr * pr + pi * pi;
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

}  // namespace detail

template <BackendScalar S>
std::size_t rank(const Matrix<S>& m, const Tolerance& tol = {}) {
  if constexpr (is_exact_v<S>) {
    return detail::echelon_pivots(m).size();
  } else {
    const auto s = detail::full_svd(m);
    return detail::numerical_rank(s, m.rows(), m.cols(), tol);
  }
}

/// Largest singular value.
inline double spectral_norm(const ApproxMatrix& m) { return detail::full_svd(m).sigma_max(); }

/// Basis of {x : m x = 0}, one column per kernel dimension.
template <BackendScalar S>
Matrix<S> kernel(const Matrix<S>& m, const Tolerance& tol = {}) {
  const std::size_t n = m.cols();
  if constexpr (is_exact_v<S>) {
    const auto rr = detail::rref(m);
    std::vector<bool> is_pivot(n, false);
    for (auto p : rr.pivots) is_pivot[p] = true;
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < n; ++j)
      if (!is_pivot[j]) free.push_back(j);
    ExactMatrix k(n, free.size());
    for (std::size_t f = 0; f < free.size(); ++f) {
      k(free[f], f) = Exact(1);
      for (std::size_t r = 0; r < rr.pivots.size(); ++r) k(rr.pivots[r], f) = -rr.r(r, free[f]);
    }
    return k;
  } else {
    const auto s = detail::full_svd(m);
    const std::size_t r = detail::numerical_rank(s, m.rows(), m.cols(), tol);
    ApproxMatrix k(n, n - r);
    for (std::size_t j = r; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) k(i, j - r) = s.v(i, j);
    return k;
  }
}

/// A linear subspace of C^n (an operator range), stored as a basis matrix
/// with independent columns. Exact bases are pivot columns of the source
/// matrix; approx bases are scaled left singular vectors.
template <BackendScalar S>
class Subspace {
 public:
  Subspace() = default;
  Subspace(std::size_t ambient_dim, Matrix<S> basis)
      : ambient_(ambient_dim), basis_(std::move(basis)) {
    require_same_dim(basis_.rows(), ambient_, "Subspace");
  }

  static Subspace zero(std::size_t n) { return Subspace(n, Matrix<S>(n, 0)); }
  static Subspace full(std::size_t n) { return Subspace(n, Matrix<S>::identity(n)); }

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return basis_.cols(); }
  std::size_t codim() const { return ambient_ - dim(); }
  const Matrix<S>& basis() const { return basis_; }

 private:
  std::size_t ambient_ = 0;
  Matrix<S> basis_;
};

template <BackendScalar S>
Subspace<S> column_space(const Matrix<S>& m, const Tolerance& tol = {}) {
  if constexpr (is_exact_v<S>) {
    return Subspace<S>(m.rows(), m.select_cols(detail::echelon_pivots(m)));
  } else {
    const auto s = detail::full_svd(m);
    const std::size_t r = detail::numerical_rank(s, m.rows(), m.cols(), tol);
    return Subspace<S>(m.rows(), detail::scaled_basis(s, r));
  }
}

namespace detail {

/// Column space of `m`, trusted to have exactly `k` independent directions
/// (used where the dimension is already fixed by a kernel computation).
template <BackendScalar S>
Subspace<S> subspace_of_rank(const Matrix<S>& m, std::size_t k) {
  if constexpr (is_exact_v<S>) {
    (void)k;
    return column_space(m);
  } else {
    if (k == 0) return Subspace<S>::zero(m.rows());
    return Subspace<S>(m.rows(), scaled_basis(full_svd(m), k));
  }
}

}  // namespace detail

template <BackendScalar S>
Subspace<S> subspace_sum(const Subspace<S>& u, const Subspace<S>& v, const Tolerance& tol = {}) {
  require_same_dim(u.ambient_dim(), v.ambient_dim(), "subspace_sum");
  return column_space(hstack(u.basis(), v.basis()), tol.relative_only());
}

/// u ∩ v from the kernel of [U | -V]: every kernel vector (x; y) gives U x = V y.
template <BackendScalar S>
Subspace<S> subspace_intersect(const Subspace<S>& u, const Subspace<S>& v,
                               const Tolerance& tol = {}) {
  require_same_dim(u.ambient_dim(), v.ambient_dim(), "subspace_intersect");
  if (u.dim() == 0 || v.dim() == 0) return Subspace<S>::zero(u.ambient_dim());
  const auto k = kernel(hstack(u.basis(), -v.basis()), tol.relative_only());
  if (k.cols() == 0) return Subspace<S>::zero(u.ambient_dim());
  return detail::subspace_of_rank(u.basis() * k.top_rows(u.dim()), k.cols());
}

/// {x : m x ∈ v}. Always contains ker m.
template <BackendScalar S>
Subspace<S> subspace_preimage(const Matrix<S>& m, const Subspace<S>& v, const Tolerance& tol = {}) {
  if (!m.is_square()) throw DimensionMismatch("subspace_preimage: matrix must be square");
  require_same_dim(m.rows(), v.ambient_dim(), "subspace_preimage");
  Matrix<S> scaled = m;
  if constexpr (!is_exact_v<S>) {
    // Bring m to unit scale so it is comparable with the normalized basis.
    const double norm = spectral_norm(m);
    if (norm > 0) scaled *= Approx(1.0 / norm);
  }
  const auto k = kernel(hstack(scaled, -v.basis()), tol.relative_only());
  if (k.cols() == 0) return Subspace<S>::zero(m.cols());
  return detail::subspace_of_rank(k.top_rows(m.cols()), k.cols());
}

/// u ⊆ v, decided by a rank test on [V | U].
template <BackendScalar S>
bool subspace_contains(const Subspace<S>& v, const Subspace<S>& u, const Tolerance& tol = {}) {
  require_same_dim(u.ambient_dim(), v.ambient_dim(), "subspace_contains");
  if (u.dim() == 0) return true;
  if (u.dim() > v.dim()) return false;
  return rank(hstack(v.basis(), u.basis()), tol.relative_only()) == v.dim();
}

template <BackendScalar S>
bool subspace_equal(const Subspace<S>& u, const Subspace<S>& v, const Tolerance& tol = {}) {
  return u.dim() == v.dim() && subspace_contains(u, v, tol) && subspace_contains(v, u, tol);
}

template <BackendScalar S>
Subspace<S> apply(const Matrix<S>& m, const Subspace<S>& u, const Tolerance& tol = {}) {
  return column_space(m * u.basis(), tol);
}

/// Orthonormal basis of an approx subspace.
inline ApproxMatrix orthonormal_basis(const Subspace<Approx>& u) {
  if (u.dim() == 0) return ApproxMatrix(u.ambient_dim(), 0);
  const auto s = detail::full_svd(u.basis());
  ApproxMatrix q(u.ambient_dim(), u.dim());
  for (std::size_t j = 0; j < u.dim(); ++j)
    for (std::size_t i = 0; i < u.ambient_dim(); ++i) q(i, j) = s.u(i, j);
  return q;
}

/// Sine of the largest principal angle between u and its best match in v,
/// i.e. ||(I - P_v) Q_u||_2. Zero iff u ⊆ v.
inline double max_principal_sine(const Subspace<Approx>& u, const Subspace<Approx>& v) {
  require_same_dim(u.ambient_dim(), v.ambient_dim(), "max_principal_sine");
  if (u.dim() == 0) return 0.0;
  const auto qu = detail::to_eigen(orthonormal_basis(u));
  const auto qv = detail::to_eigen(orthonormal_basis(v));
  Eigen::MatrixXcd r = qu;
  if (v.dim() > 0) r -= qv * (qv.adjoint() * qu);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r);
  return svd.singularValues()(0);
}

/// Subspace equality with an explicit principal-angle tolerance.
inline bool subspace_equal_within(const Subspace<Approx>& u, const Subspace<Approx>& v,
                                  double angle_tol) {
  return u.dim() == v.dim() && max_principal_sine(u, v) <= angle_tol &&
         max_principal_sine(v, u) <= angle_tol;
}

template <BackendScalar To, BackendScalar From>
Subspace<To> convert(const Subspace<From>& u) {
  return Subspace<To>(u.ambient_dim(), convert<To>(u.basis()));
}

/// Eigen-decomposition of the Hermitian part of `m`, ascending eigenvalues.
struct HermitianEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

inline HermitianEigen eigh(const ApproxMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("eigh: matrix must be square");
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(detail::to_eigen(hermitian_part(m)));
  return {es.eigenvalues(), es.eigenvectors()};
}

inline double lambda_max(const ApproxMatrix& m) {
  const auto e = eigh(m);
  return e.values.size() ? e.values(e.values.size() - 1) : 0.0;
}
inline double lambda_min(const ApproxMatrix& m) {
  const auto e = eigh(m);
  return e.values.size() ? e.values(0) : 0.0;
}

template <BackendScalar S>
bool is_hermitian(const Matrix<S>& m, const Tolerance& tol = {}) {
  if (!m.is_square()) return false;
  if constexpr (is_exact_v<S>) {
    return m == m.adjoint();
  } else {
    const double thr = tol.threshold(m.rows(), m.cols(), spectral_norm(m));
    return max_abs(m - m.adjoint()) <= thr;
  }
}

namespace detail {

/// Symmetrically pivoted LDL* on a Hermitian matrix. Returns the number of
/// positive pivots (the rank), or nullopt when the matrix is not PSD.
inline std::optional<std::size_t> ldl_psd_rank(ExactMatrix a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> live(n);
  std::iota(live.begin(), live.end(), 0);
  std::size_t pivots = 0;
  while (!live.empty()) {
    std::size_t best = live.size();
    for (std::size_t k = 0; k < live.size(); ++k) {
      const auto& d = a(live[k], live[k]).re();
      if (sgn(d) < 0) return std::nullopt;
      if (sgn(d) > 0 && (best == live.size() || d > a(live[best], live[best]).re())) best = k;
    }
    if (best == live.size()) {
      // All remaining pivots vanish: the trailing block must be zero.
      for (auto i : live)
        for (auto j : live)
          if (!a(i, j).is_zero()) return std::nullopt;
      return pivots;
    }
    const std::size_t p = live[best];
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(best));
    ++pivots;
    const Exact inv = Exact(1) / a(p, p);
    for (auto i : live) {
      if (a(i, p).is_zero()) continue;
      const Exact f = a(i, p) * inv;
      for (auto j : live) add_product(a(i, j), f, a(p, j), true);
    }
  }
  return pivots;
}

}  // namespace detail

/// Hermitian positive semidefinite test. The exact backend runs a
/// symmetrically pivoted LDL* elimination: a negative diagonal entry, or a
/// zero diagonal with a nonzero off-diagonal in its row, certifies failure.
template <BackendScalar S>
bool psd_check(const Matrix<S>& m, const Tolerance& tol = {}) {
  if (!m.is_square()) throw DimensionMismatch("psd_check: matrix must be square");
  if (!is_hermitian(m, tol)) return false;
  const std::size_t n = m.rows();
  if constexpr (is_exact_v<S>) {
    return detail::ldl_psd_rank(m).has_value();
  } else {
    const auto e = eigh(m);
    const double norm = e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0;
    const double thr = tol.threshold(n, n, norm);
    return n == 0 || e.values(0) >= -thr;
  }
}

/// Inverse of a square matrix; throws SingularMatrix when none exists.
template <BackendScalar S>
Matrix<S> inverse(const Matrix<S>& m, const Tolerance& tol = {}) {
  if (!m.is_square()) throw DimensionMismatch("inverse: matrix must be square");
  const std::size_t n = m.rows();
  if constexpr (is_exact_v<S>) {
    const auto rr = detail::rref(hstack(m, ExactMatrix::identity(n)));
    if (rr.pivots.size() < n || (n > 0 && rr.pivots[n - 1] != n - 1))
      throw SingularMatrix("inverse: matrix is singular");
    return rr.r.block(0, n, n, n);
  } else {
    if (rank(m, tol) < n) throw SingularMatrix("inverse: matrix is numerically singular");
    return detail::from_eigen(detail::to_eigen(m).fullPivLu().inverse());
  }
}

inline Exact determinant(const ExactMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("determinant: matrix must be square");
  ExactMatrix a = m;
  const std::size_t n = a.rows();
  Exact det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c).is_zero()) ++p;
    if (p == n) return Exact(0);
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      det = -det;
    }
    det *= a(c, c);
    const Exact inv = Exact(1) / a(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a(i, c).is_zero()) continue;
      const Exact f = a(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) add_product(a(i, j), f, a(c, j), true);
    }
  }
  return det;
}

/// Moore-Penrose pseudoinverse. Exact route: full-rank factorization
/// m = F G with F the pivot columns and G the nonzero RREF rows, then
/// m+ = G* (F* m G*)^-1 F*.
template <BackendScalar S>
Matrix<S> pinv(const Matrix<S>& m, const Tolerance& tol = {}) {
  if constexpr (is_exact_v<S>) {
    const auto rr = detail::rref(m);
    const std::size_t r = rr.pivots.size();
    if (r == 0) return ExactMatrix(m.cols(), m.rows());
    const ExactMatrix f = m.select_cols(rr.pivots);
    const ExactMatrix g = rr.r.top_rows(r);
    const ExactMatrix gs = g.adjoint();
    const ExactMatrix core = f.adjoint() * m * gs;
    return gs * inverse(core) * f.adjoint();
  } else {
    const auto s = detail::full_svd(m);
    const std::size_t r = detail::numerical_rank(s, m.rows(), m.cols(), tol);
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(m.cols(), m.rows());
    for (std::size_t k = 0; k < r; ++k)
      p += s.v.col(k) * (1.0 / s.sigma(k)) * s.u.col(k).adjoint();
    return detail::from_eigen(p);
  }
}

/// Orthogonal projection onto an approx subspace.
inline ApproxMatrix orthogonal_projection(const Subspace<Approx>& u) {
  const auto q = orthonormal_basis(u);
  return q * q.adjoint();
}

}  // namespace psdcone
