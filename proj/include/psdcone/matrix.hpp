#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <vector>

#include "psdcone/error.hpp"
#include "psdcone/scalar.hpp"

namespace psdcone {

/// Dense row-major matrix over one of the two scalar backends. Zero rows or
/// columns are allowed so that the trivial subspace has a basis.
template <BackendScalar S>
class Matrix {
 public:
  using Scalar = S;
  using Traits = ScalarTraits<S>;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<S> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw DimensionMismatch("Matrix: entry count does not match dimensions");
  }
  Matrix(std::initializer_list<std::initializer_list<S>> rows) : rows_(rows.size()) {
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionMismatch("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }
  static Matrix diag(std::span<const S> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static Matrix diag(std::initializer_list<S> d) {
    return diag(std::span<const S>(d.begin(), d.size()));
  }
  static Matrix column(std::span<const S> v) {
    return Matrix(v.size(), 1, std::vector<S>(v.begin(), v.end()));
  }
  static Matrix column(std::initializer_list<S> v) {
    return column(std::span<const S>(v.begin(), v.size()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  const std::vector<S>& data() const { return data_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<S> col(std::size_t j) const {
    std::vector<S> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Matrix select_cols(std::span<const std::size_t> idx) const {
    Matrix m(rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < idx.size(); ++k) m(i, k) = (*this)(i, idx[k]);
    return m;
  }
  Matrix top_rows(std::size_t n) const {
    Matrix m(n, cols_);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }

  Matrix adjoint() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = Traits::conj((*this)(i, j));
    return m;
  }
  Matrix conjugate() const {
    Matrix m(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) m.data_[k] = Traits::conj(data_[k]);
    return m;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!Traits::is_zero(x)) return false;
    return true;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const S& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const S& s) { return a *= s; }
  friend Matrix operator*(const S& s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("Matrix product: inner dimensions differ");
    Matrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (Traits::is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) add_product(m(i, j), aik, b(k, j));
      }
    return m;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << "[";
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << m(i, j);
      os << "]\n";
    }
    return os;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionMismatch("Matrix: shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

using ExactMatrix = Matrix<Exact>;
using ApproxMatrix = Matrix<Approx>;

template <BackendScalar S>
Matrix<S> hstack(const Matrix<S>& a, const Matrix<S>& b) {
  require_same_dim(a.rows(), b.rows(), "hstack");
  Matrix<S> m(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
  }
  return m;
}

/// Conversion between backends. Exact -> approx rounds; approx -> exact is
/// exact (doubles are dyadic rationals).
template <BackendScalar To, BackendScalar From>
Matrix<To> convert(const Matrix<From>& m) {
  if constexpr (std::same_as<To, From>) {
    return m;
  } else {
    std::vector<To> d;
    d.reserve(m.data().size());
    for (const auto& x : m.data())
      d.push_back(ScalarTraits<To>::from_complex(ScalarTraits<From>::to_complex(x)));
    return Matrix<To>(m.rows(), m.cols(), std::move(d));
  }
}

template <BackendScalar S>
Matrix<S> hermitian_part(const Matrix<S>& m) {
  Matrix<S> h = m + m.adjoint();
  return h * S(ScalarTraits<S>::from_complex({0.5, 0.0}));
}

template <BackendScalar S>
double max_abs(const Matrix<S>& m) {
  double r = 0;
  for (const auto& x : m.data()) r = std::max(r, std::abs(ScalarTraits<S>::to_complex(x)));
  return r;
}

}  // namespace psdcone
