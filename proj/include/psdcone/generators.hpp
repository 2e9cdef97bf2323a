#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <utility>

#include "psdcone/relations.hpp"
#include "psdcone/semilinear.hpp"

namespace psdcone {

using Seed = std::uint64_t;

inline constexpr int kRetryBudget = 64;
/// Real and imaginary parts of exact entries are drawn from [-kEntryRange, kEntryRange].
inline constexpr long kEntryRange = 3;

/// splitmix64 finalizer; used to derive independent sub-seeds.
inline Seed mix_seed(Seed seed, Seed salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Portable draws on top of mt19937_64 (whose output sequence is fixed by
/// the standard, unlike the std distributions).
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(mix_seed(seed, 0)) {}

  std::uint64_t next() { return engine_(); }
  long uniform_int(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(next() % span);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

inline ExactMatrix random_gaussian_integer_matrix(std::size_t rows, std::size_t cols, Rng& rng,
                                                  long range = kEntryRange) {
  ExactMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = Exact(rng.uniform_int(-range, range), rng.uniform_int(-range, range));
  return m;
}

inline ApproxMatrix random_complex_normal_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  ApproxMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = Approx(rng.normal(), rng.normal()) / std::numbers::sqrt2;
  return m;
}

namespace detail {

inline ExactMatrix full_column_rank_factor(std::size_t dim, std::size_t rank, Rng& rng) {
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    auto g = random_gaussian_integer_matrix(dim, rank, rng);
    if (psdcone::rank(g) == rank) return g;
  }
  throw RetryExhausted("random factor: retry budget exhausted");
}

inline PsdOperator<Exact> gram(const ExactMatrix& g) { return PsdOperator<Exact>(g * g.adjoint()); }

}  // namespace detail

/// G G* with G a dim x rank matrix of seeded entries; the rank is certified.
template <BackendScalar S>
PsdOperator<S> random_psd(std::size_t dim, std::size_t rank, Seed seed) {
  if (rank > dim) throw InvalidArgument("random_psd: rank exceeds dimension");
  Rng rng(seed);
  if constexpr (is_exact_v<S>) {
    for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
      auto a = detail::gram(random_gaussian_integer_matrix(dim, rank, rng));
      if (a.rank() == rank) return a;
    }
  } else {
    for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
      const auto g = random_complex_normal_matrix(dim, rank, rng);
      PsdOperator<S> a(g * g.adjoint());
      if (a.rank() == rank) return a;
    }
  }
  throw RetryExhausted("random_psd: retry budget exhausted");
}

/// Invertible Gaussian-integer matrix with the requested flavor.
template <BackendScalar S>
SemilinearOperator<S> random_semilinear(std::size_t dim, Seed seed, Flavor flavor) {
  Rng rng(seed);
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    auto t = random_gaussian_integer_matrix(dim, dim, rng);
    if (!determinant(t).is_zero()) return SemilinearOperator<S>(convert<S>(t), flavor);
  }
  throw RetryExhausted("random_semilinear: retry budget exhausted");
}

enum class PairRelation { singular, ac, incomparable };

inline const char* relation_name(PairRelation r) {
  switch (r) {
    case PairRelation::singular: return "singular";
    case PairRelation::ac: return "ac";
    case PairRelation::incomparable: return "incomparable";
  }
  return "?";
}

/// Pair certified (on the exact backend) to satisfy the requested relation.
/// For `ac`, half the draws have rank(a) < rank(b) and half have equal range.
template <BackendScalar S>
std::pair<PsdOperator<S>, PsdOperator<S>> random_pair_with_relation(std::size_t dim, PairRelation rel,
                                                                     Seed seed) {
  if (dim == 0) throw InvalidArgument("random_pair_with_relation: dimension must be positive");
  if (rel == PairRelation::singular && dim < 2)
    throw InvalidArgument("random_pair_with_relation: singular pairs of nonzero operators need dim >= 2");
  if (rel == PairRelation::incomparable && dim < 3)
    throw InvalidArgument("random_pair_with_relation: incomparable pairs need dim >= 3");
  Rng rng(seed);
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    ExactMatrix ga, gb;
    std::optional<PsdOperator<Exact>> a, b;
    bool ok = false;
    switch (rel) {
      case PairRelation::singular: {
        const auto ra = static_cast<std::size_t>(rng.uniform_int(1, static_cast<long>(dim) - 1));
        const auto rb = static_cast<std::size_t>(rng.uniform_int(1, static_cast<long>(dim - ra)));
        ga = random_gaussian_integer_matrix(dim, ra, rng);
        gb = random_gaussian_integer_matrix(dim, rb, rng);
        a = detail::gram(ga), b = detail::gram(gb);
        ok = a->rank() == ra && b->rank() == rb && range_relations(range(*a), range(*b)).singular;
        break;
      }
      case PairRelation::ac: {
        const auto rb = static_cast<std::size_t>(rng.uniform_int(1, static_cast<long>(dim)));
        const bool strict = rng.coin();
        const std::size_t ra = strict ? static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(rb) - 1)) : rb;
        gb = random_gaussian_integer_matrix(dim, rb, rng);
        ga = gb * random_gaussian_integer_matrix(rb, ra, rng);
        a = detail::gram(ga), b = detail::gram(gb);
        const auto rel = range_relations(range(*a), range(*b));
        ok = a->rank() == ra && b->rank() == rb && rel.ac_ab && (strict || rel.ac_ba);
        break;
      }
      case PairRelation::incomparable: {
        const auto k = static_cast<std::size_t>(rng.uniform_int(1, static_cast<long>(dim) - 2));
        const auto ea = static_cast<std::size_t>(rng.uniform_int(1, static_cast<long>(dim - k) - 1));
        const auto eb = static_cast<std::size_t>(rng.uniform_int(1, static_cast<long>(dim - k - ea)));
        const auto w = random_gaussian_integer_matrix(dim, k, rng);
        ga = hstack(w, random_gaussian_integer_matrix(dim, ea, rng));
        gb = hstack(w, random_gaussian_integer_matrix(dim, eb, rng));
        a = detail::gram(ga), b = detail::gram(gb);
        const auto rel = range_relations(range(*a), range(*b));
        ok = !rel.ac_ab && !rel.ac_ba && !rel.singular;
        break;
      }
    }
    if (ok) {
      return {convert<S>(*a), convert<S>(*b)};
    }
  }
  throw RetryExhausted("random_pair_with_relation: retry budget exhausted");
}

/// Exact pair with independently drawn ranks in [0, dim]; used to cover every
/// rank combination.
inline std::pair<PsdOperator<Exact>, PsdOperator<Exact>> random_pair_any_ranks(std::size_t dim, Seed seed) {
  Rng rng(seed);
  const auto ra = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(dim)));
  const auto rb = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(dim)));
  return {random_psd<Exact>(dim, ra, mix_seed(seed, 1)), random_psd<Exact>(dim, rb, mix_seed(seed, 2))};
}

/// Mixed sampler used by the preservation checks: unconstrained ranks plus
/// relation-targeted pairs so that both truth values of each relation occur.
inline std::pair<PsdOperator<Exact>, PsdOperator<Exact>> sample_test_pair(std::size_t dim, Seed seed) {
  Rng rng(seed);
  const auto pick = rng.uniform_int(0, 4);
  const Seed sub = mix_seed(seed, 7);
  switch (pick) {
    case 1:
      if (dim >= 2) return random_pair_with_relation<Exact>(dim, PairRelation::singular, sub);
      break;
    case 2: return random_pair_with_relation<Exact>(dim, PairRelation::ac, sub);
    case 3: {
      auto p = random_pair_with_relation<Exact>(dim, PairRelation::ac, sub);
      return {p.second, p.first};
    }
    case 4:
      if (dim >= 3) return random_pair_with_relation<Exact>(dim, PairRelation::incomparable, sub);
      break;
    default: break;
  }
  return random_pair_any_ranks(dim, sub);
}

}  // namespace psdcone
