#pragma once

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "psdcone/psdcone.hpp"

namespace psdcone::testing {

inline Exact q(long p, long d = 1) { return Exact(mpq_class(p, d), mpq_class(0)); }
inline Exact gi(long re, long im) { return Exact(re, im); }

inline ExactMatrix ediag(std::initializer_list<long> d) {
  std::vector<Exact> v;
  for (long x : d) v.push_back(Exact(x));
  return ExactMatrix::diag(std::span<const Exact>(v));
}

inline ApproxMatrix fdiag(std::initializer_list<double> d) {
  std::vector<Approx> v;
  for (double x : d) v.push_back(Approx(x));
  return ApproxMatrix::diag(std::span<const Approx>(v));
}

inline ExactMatrix ones(std::size_t n) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Exact(1);
  return m;
}

inline PsdOperator<Exact> epsd(const ExactMatrix& m) { return PsdOperator<Exact>(m); }
inline PsdOperator<Approx> fpsd(const ApproxMatrix& m) { return PsdOperator<Approx>(m); }
inline PsdOperator<Approx> fpsd(const ExactMatrix& m) { return PsdOperator<Approx>(convert<Approx>(m)); }

inline Subspace<Exact> span(std::initializer_list<std::initializer_list<long>> cols, std::size_t n) {
  ExactMatrix b(n, cols.size());
  std::size_t j = 0;
  for (const auto& c : cols) {
    std::size_t i = 0;
    for (long x : c) b(i++, j) = Exact(x);
    ++j;
  }
  return column_space(b);
}

inline double dist(const ApproxMatrix& a, const ApproxMatrix& b) { return max_abs(a - b); }

}  // namespace psdcone::testing
