#pragma once

#include <string_view>

#include "psdcone/linalg.hpp"

namespace psdcone {

enum class Flavor { linear, conjugate };

inline const char* flavor_name(Flavor f) { return f == Flavor::linear ? "linear" : "conjugate"; }

inline Flavor parse_flavor(std::string_view s) {
  if (s == "linear") return Flavor::linear;
  if (s == "conjugate") return Flavor::conjugate;
  throw InvalidArgument("unknown flavor '" + std::string(s) + "' (expected linear|conjugate)");
}

/// Invertible matrix acting either linearly, x -> T x, or conjugate-linearly,
/// x -> T conj(x).
template <BackendScalar S>
class SemilinearOperator {
 public:
  SemilinearOperator() = default;
  SemilinearOperator(Matrix<S> t, Flavor flavor, const Tolerance& tol = {})
      : t_(std::move(t)), flavor_(flavor) {
    if (!t_.is_square()) throw InvalidArgument("SemilinearOperator: matrix must be square");
    if (rank(t_, tol) != t_.rows())
      throw SingularMatrix("SemilinearOperator: matrix is not invertible");
  }

  const Matrix<S>& matrix() const { return t_; }
  Flavor flavor() const { return flavor_; }
  std::size_t dim() const { return t_.rows(); }

  /// Column-wise action on a block of vectors.
  Matrix<S> apply(const Matrix<S>& x) const {
    return flavor_ == Flavor::linear ? t_ * x : t_ * x.conjugate();
  }
  std::vector<S> apply(std::span<const S> v) const { return apply(Matrix<S>::column(v)).col(0); }

  Subspace<S> apply(const Subspace<S>& u, const Tolerance& tol = {}) const {
    require_same_dim(u.ambient_dim(), dim(), "SemilinearOperator::apply");
    return column_space(apply(u.basis()), tol);
  }

 private:
  Matrix<S> t_;
  Flavor flavor_ = Flavor::linear;
};

template <BackendScalar To, BackendScalar From>
SemilinearOperator<To> convert(const SemilinearOperator<From>& t) {
  return SemilinearOperator<To>(convert<To>(t.matrix()), t.flavor());
}

}  // namespace psdcone
