#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <ostream>
#include <string>

#include <gmpxx.h>

namespace psdcone {

enum class Backend { exact, approx };

/// Complex number with rational real and imaginary parts. mpq_class keeps
/// both parts in lowest terms with a positive denominator.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(long re, long im) : re_(re), im_(im) {}
  GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  /// Exact conversion: every finite double is a dyadic rational.
  static GaussianRational from_complex(std::complex<double> z) {
    return {mpq_class(z.real()), mpq_class(z.imag())};
  }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, mpq_class(-im_)}; }
  mpq_class norm2() const { return mpq_class(re_ * re_ + im_ * im_); }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  GaussianRational operator-() const { return {mpq_class(-re_), mpq_class(-im_)}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    if (this == &o) return *this = GaussianRational(*this) *= o;
    if (o.is_real()) {
      re_ *= o.re_;
      im_ *= o.re_;
      return *this;
    }
    if (is_real()) {
      mpq_mul(im_.get_mpq_t(), re_.get_mpq_t(), o.im_.get_mpq_t());
      re_ *= o.re_;
      return *this;
    }
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }

  /// *this += a * b (or -= when subtract) without heap temporaries.
  GaussianRational& add_product(const GaussianRational& a, const GaussianRational& b, bool subtract = false) {
    if (this == &a || this == &b) {
      const GaussianRational p = a * b;
      return subtract ? *this -= p : *this += p;
    }
    if (a.is_zero() || b.is_zero()) return *this;
    thread_local mpq_class t;
    auto acc = [&](mpq_class& dst, const mpq_class& x, const mpq_class& y, bool neg) {
      if (sgn(x) == 0 || sgn(y) == 0) return;
      if (is_integer(dst) && is_integer(x) && is_integer(y)) {
        // integers: no gcd work, the denominator stays 1
        if (neg != subtract) mpz_submul(mpq_numref(dst.get_mpq_t()), mpq_numrefc(x), mpq_numrefc(y));
        else mpz_addmul(mpq_numref(dst.get_mpq_t()), mpq_numrefc(x), mpq_numrefc(y));
        return;
      }
      mpq_mul(t.get_mpq_t(), x.get_mpq_t(), y.get_mpq_t());
      if (neg != subtract) mpq_sub(dst.get_mpq_t(), dst.get_mpq_t(), t.get_mpq_t());
      else mpq_add(dst.get_mpq_t(), dst.get_mpq_t(), t.get_mpq_t());
    };
    acc(re_, a.re_, b.re_, false);
    acc(re_, a.im_, b.im_, true);
    acc(im_, a.re_, b.im_, false);
    acc(im_, a.im_, b.re_, false);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    mpq_class d = o.norm2();
    if (sgn(d) == 0) throw std::domain_error("GaussianRational: division by zero");
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / d;
    mpq_class i = (im_ * o.re_ - re_ * o.im_) / d;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
    os << z.re_;
    if (!z.is_real()) os << (sgn(z.im_) < 0 ? "-" : "+") << abs(z.im_) << "i";
    return os;
  }

 private:
  static bool is_integer(const mpq_class& x) { return mpz_cmp_ui(mpq_denref(x.get_mpq_t()), 1) == 0; }
  static mpz_srcptr mpq_numrefc(const mpq_class& x) { return mpq_numref(x.get_mpq_t()); }

  mpq_class re_{0};
  mpq_class im_{0};
};

using Exact = GaussianRational;
using Approx = std::complex<double>;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Exact> {
  static constexpr bool exact = true;
  static constexpr Backend backend = Backend::exact;
  static Exact conj(const Exact& z) { return z.conj(); }
  static bool is_zero(const Exact& z) { return z.is_zero(); }
  static std::complex<double> to_complex(const Exact& z) { return z.to_complex(); }
  static Exact from_complex(std::complex<double> z) { return Exact::from_complex(z); }
  static Exact from_int(long re, long im = 0) { return {re, im}; }
};

template <>
struct ScalarTraits<Approx> {
  static constexpr bool exact = false;
  static constexpr Backend backend = Backend::approx;
  static Approx conj(const Approx& z) { return std::conj(z); }
  static bool is_zero(const Approx& z) { return z == Approx{}; }
  static std::complex<double> to_complex(const Approx& z) { return z; }
  static Approx from_complex(std::complex<double> z) { return z; }
  static Approx from_int(long re, long im = 0) {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

template <class S>
inline constexpr bool is_exact_v = ScalarTraits<S>::exact;

template <class S>
concept BackendScalar = std::same_as<S, Exact> || std::same_as<S, Approx>;

/// Relative tolerance for numerical-rank and PSD decisions on the approx
/// backend. A negative `rel` selects the default max(rows, cols) * eps; a
/// negative `ref_norm` means "measure against the matrix's own norm".
/// Ignored entirely by the exact backend.
struct Tolerance {
  double rel = -1.0;
  double ref_norm = -1.0;

  double relative(std::size_t rows, std::size_t cols) const {
    if (rel >= 0) return rel;
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
  }
  double threshold(std::size_t rows, std::size_t cols, double own_norm) const {
    return relative(rows, cols) * (ref_norm >= 0 ? ref_norm : own_norm);
  }
  Tolerance with_ref(double norm) const { return {rel, norm}; }
  /// Same relative level, measured against each matrix's own norm.
  Tolerance relative_only() const { return {rel, -1.0}; }
};

inline const char* backend_name(Backend b) { return b == Backend::exact ? "exact" : "float"; }

/// acc += a * b, or acc -= a * b.
inline void add_product(Exact& acc, const Exact& a, const Exact& b, bool subtract = false) {
  acc.add_product(a, b, subtract);
}
inline void add_product(Approx& acc, const Approx& a, const Approx& b, bool subtract = false) {
  if (subtract) acc -= a * b;
  else acc += a * b;
}

}  // namespace psdcone
