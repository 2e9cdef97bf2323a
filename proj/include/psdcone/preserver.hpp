#pragma once

#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psdcone/generators.hpp"
#include "psdcone/relations.hpp"
#include "psdcone/semilinear.hpp"

namespace psdcone {

/// Seeded rule A -> Z_A producing invertible positive operators. The seed is
/// combined with a hash of A's entries, so equal inputs give equal Z_A.
/// `fixed`, when set, is returned for every A.
struct ZFamily {
  Seed seed = 0;
  std::optional<ApproxMatrix> fixed;

  ApproxMatrix operator()(const ApproxMatrix& a) const {
    if (fixed) return *fixed;
    const std::size_t n = a.rows();
    Rng rng(mix_seed(seed, hash(a)));
    const auto g = random_complex_normal_matrix(n, n, rng);
    return ApproxMatrix::identity(n) + g * g.adjoint() * Approx(1.0 / static_cast<double>(n));
  }

  /// FNV-1a over the round-trip decimal form of every entry.
  static std::uint64_t hash(const ApproxMatrix& a) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[64];
    for (const auto& x : a.data()) {
      const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g;", x.real(), x.imag());
      for (int i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(buf[i]);
        h *= 0x100000001b3ULL;
      }
    }
    return h;
  }
};

enum class MapKind { congruence, form_iv, wild, composite };

inline const char* map_kind_name(MapKind k) {
  switch (k) {
    case MapKind::congruence: return "congruence";
    case MapKind::form_iv: return "form_iv";
    case MapKind::wild: return "wild";
    case MapKind::composite: return "composite";
  }
  return "?";
}

/// Description of a map on the positive cone.
///   congruence: A -> T A' T*           (A' = A, or conj(A) for the conjugate flavor)
///   form_iv:    A -> R Z_A R,  R = (T A' T*)^{1/2}
///   wild:       A -> V A^e V* on invertible A (e = +-1), identity elsewhere
///   composite:  parts applied left to right
struct PreserverSpec {
  MapKind kind = MapKind::congruence;
  std::size_t dim = 0;
  ExactMatrix t;
  Flavor flavor = Flavor::linear;
  ZFamily z;
  Seed wild_seed = 0;
  ExactMatrix wild_v;
  int wild_exponent = 1;
  std::vector<PreserverSpec> parts;

  static PreserverSpec congruence(const SemilinearOperator<Exact>& t) {
    PreserverSpec s;
    s.kind = MapKind::congruence;
    s.dim = t.dim();
    s.t = t.matrix();
    s.flavor = t.flavor();
    return s;
  }
  static PreserverSpec form_iv(const SemilinearOperator<Exact>& t, ZFamily z) {
    PreserverSpec s = congruence(t);
    s.kind = MapKind::form_iv;
    s.z = std::move(z);
    return s;
  }
  static PreserverSpec wild(ExactMatrix v, int exponent, Seed seed = 0) {
    if (exponent != 1 && exponent != -1) throw InvalidArgument("wild map: exponent must be +1 or -1");
    SemilinearOperator<Exact> check(v, Flavor::linear);  // validates invertibility
    PreserverSpec s;
    s.kind = MapKind::wild;
    s.dim = v.rows();
    s.wild_v = std::move(v);
    s.wild_exponent = exponent;
    s.wild_seed = seed;
    return s;
  }
  static PreserverSpec composite(std::vector<PreserverSpec> parts) {
    if (parts.empty()) throw InvalidArgument("composite map: no parts");
    PreserverSpec s;
    s.kind = MapKind::composite;
    s.dim = parts.front().dim;
    for (const auto& p : parts) require_same_dim(p.dim, s.dim, "composite map");
    s.parts = std::move(parts);
    return s;
  }

  /// True when evaluation needs square roots (some form_iv part).
  bool requires_approx() const {
    if (kind == MapKind::form_iv) return true;
    for (const auto& p : parts)
      if (p.requires_approx()) return true;
    return false;
  }

  std::optional<SemilinearOperator<Exact>> semilinear() const {
    if (kind != MapKind::congruence && kind != MapKind::form_iv) return std::nullopt;
    return SemilinearOperator<Exact>(t, flavor);
  }
};

/// Seeded wild map: random invertible Gaussian-integer V and exponent +-1.
inline PreserverSpec make_wild_map(Seed seed, std::size_t dim) {
  Rng rng(seed);
  const int exponent = rng.coin() ? 1 : -1;
  auto v = random_semilinear<Exact>(dim, mix_seed(seed, 1), Flavor::linear).matrix();
  return PreserverSpec::wild(std::move(v), exponent, seed);
}

template <BackendScalar S>
PsdOperator<S> apply_map(const PreserverSpec& spec, const PsdOperator<S>& a, const Tolerance& tol = {}) {
  require_same_dim(a.dim(), spec.dim, "apply_map");
  switch (spec.kind) {
    case MapKind::congruence: {
      const auto t = convert<S>(spec.t);
      const Matrix<S> x = spec.flavor == Flavor::linear ? a.matrix() : a.matrix().conjugate();
      return PsdOperator<S>(t * x * t.adjoint(), tol);
    }
    case MapKind::form_iv: {
      if constexpr (is_exact_v<S>) {
        throw BackendError("apply_map: form_iv maps need the float backend");
      } else {
        const auto t = convert<S>(spec.t);
        const Matrix<S> x = spec.flavor == Flavor::linear ? a.matrix() : a.matrix().conjugate();
        const auto root = psd_sqrt(PsdOperator<S>(t * x * t.adjoint(), tol), tol).matrix();
        return PsdOperator<S>(root * spec.z(a.matrix()) * root, tol);
      }
    }
    case MapKind::wild: {
      if (!is_invertible_positive(a)) return a;
      const auto v = convert<S>(spec.wild_v);
      const Matrix<S> p = spec.wild_exponent == 1 ? a.matrix() : inverse(a.matrix(), tol);
      return PsdOperator<S>(v * p * v.adjoint(), tol);
    }
    case MapKind::composite: {
      PsdOperator<S> x = a;
      for (const auto& part : spec.parts) x = apply_map(part, x, tol);
      return x;
    }
  }
  throw InvalidArgument("apply_map: unknown map kind");
}

template <BackendScalar S>
using ConeMap = std::function<PsdOperator<S>(const PsdOperator<S>&)>;

template <BackendScalar S>
ConeMap<S> as_cone_map(const PreserverSpec& spec, const Tolerance& tol = {}) {
  return [spec, tol](const PsdOperator<S>& a) { return apply_map(spec, a, tol); };
}

struct RelationViolation {
  std::string relation;  ///< "ac(A,B)", "ac(B,A)" or "singular"
  bool before = false;
  bool after = false;
  ExactMatrix a;
  ExactMatrix b;
};

inline constexpr std::size_t kMaxStoredViolations = 8;

struct PreservationReport {
  std::size_t trials = 0;
  std::size_t ac_true = 0;        ///< sampled pairs with A ≪ B
  std::size_t singular_true = 0;  ///< sampled pairs with A ⊥ B
  std::size_t violation_count = 0;
  std::size_t skipped = 0;  ///< float runs: pairs whose images the tolerance cannot resolve
  std::vector<RelationViolation> violations;  ///< first few, verbatim

  bool passed() const { return violation_count == 0; }
  void merge(const PreservationReport& o) {
    trials += o.trials;
    skipped += o.skipped;
    ac_true += o.ac_true;
    singular_true += o.singular_true;
    violation_count += o.violation_count;
    for (const auto& v : o.violations)
      if (violations.size() < kMaxStoredViolations) violations.push_back(v);
  }
};

inline PairRelations exact_pair_relations(const PsdOperator<Exact>& a, const PsdOperator<Exact>& b) {
  return range_relations(range(a), range(b));
}

/// Checks A ≪ B, B ≪ A and A ⊥ B against their images for one pair. The
/// preimage side is decided exactly (or passed in); the image side on backend S.
template <BackendScalar S>
void check_pair_preservation(const ConeMap<S>& phi, const PsdOperator<Exact>& a, const PsdOperator<Exact>& b,
                             const PairRelations& before, PreservationReport& rep, const Tolerance& tol = {}) {
  const auto fa = phi(convert<S>(a, tol));
  const auto fb = phi(convert<S>(b, tol));
  const auto after = range_relations(range(fa, tol), range(fb, tol), tol);
  ++rep.trials;
  rep.ac_true += before.ac_ab;
  rep.singular_true += before.singular;
  auto record = [&](const char* name, bool was, bool is) {
    if (was == is) return;
    ++rep.violation_count;
    if (rep.violations.size() < kMaxStoredViolations)
      rep.violations.push_back({name, was, is, a.matrix(), b.matrix()});
  };
  record("ac(A,B)", before.ac_ab, after.ac_ab);
  record("ac(B,A)", before.ac_ba, after.ac_ba);
  record("singular", before.singular, after.singular);
}

template <BackendScalar S>
void check_pair_preservation(const ConeMap<S>& phi, const PsdOperator<Exact>& a, const PsdOperator<Exact>& b,
                             PreservationReport& rep, const Tolerance& tol = {}) {
  check_pair_preservation(phi, a, b, exact_pair_relations(a, b), rep, tol);
}

namespace detail {

/// Smallest over largest nonzero singular value of a matrix of known rank.
inline double nonzero_condition(const ApproxMatrix& m, std::size_t rank) {
  if (rank == 0) return 1.0;
  const auto s = full_svd(m);
  return s.sigma(rank - 1) / s.sigma(0);
}

}  // namespace detail

/// Lower bound on the nonzero-spectrum condition ratio of phi(A) for
/// congruence and form_iv maps: cond(A) cond(T)^2, times cond(Z_A) for form_iv.
inline double image_condition_bound(const PreserverSpec& spec, const PsdOperator<Exact>& a,
                                    std::optional<double> t_condition = std::nullopt) {
  if (spec.kind != MapKind::congruence && spec.kind != MapKind::form_iv)
    throw InvalidArgument("image_condition_bound: needs a congruence or form_iv map");
  const auto fa = convert<Approx>(a.matrix());
  const double ct = t_condition ? *t_condition : detail::nonzero_condition(convert<Approx>(spec.t), spec.dim);
  double bound = detail::nonzero_condition(fa, a.rank()) * ct * ct;
  if (spec.kind == MapKind::form_iv) bound *= detail::nonzero_condition(spec.z(fa), spec.dim);
  return bound;
}

/// Float rank decisions at relative tolerance tol are trusted only when the
/// image spectrum provably clears it by this factor.
inline constexpr double kResolvableFactor = 100.0;

inline bool float_resolvable(const PreserverSpec& spec, const PsdOperator<Exact>& a, const PsdOperator<Exact>& b,
                             const Tolerance& tol) {
  if (spec.kind != MapKind::congruence && spec.kind != MapKind::form_iv) return true;
  const double floor = kResolvableFactor * tol.relative(spec.dim, spec.dim);
  const double ct = detail::nonzero_condition(convert<Approx>(spec.t), spec.dim);
  return image_condition_bound(spec, a, ct) >= floor && image_condition_bound(spec, b, ct) >= floor;
}

/// Samples pairs across ranks and relation classes and checks that ≪ and ⊥
/// hold for (A, B) exactly when they hold for the images. Passing is a
/// necessary condition only: bijectivity and the quantifier over the whole
/// cone cannot be certified from samples.
template <BackendScalar S>
PreservationReport verify_relation_preservation(const ConeMap<S>& phi, std::size_t dim, std::size_t trials,
                                                Seed seed, const Tolerance& tol = {}) {
  PreservationReport rep;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto [a, b] = sample_test_pair(dim, mix_seed(seed, i));
    check_pair_preservation(phi, a, b, rep, tol);
  }
  return rep;
}

/// Draws beyond trials are capped at this multiple when skipping pairs.
inline constexpr std::size_t kMaxDrawFactor = 20;

/// On the float backend, congruence and form_iv pairs outside the resolution
/// of tol are skipped (counted in `skipped`) and replaced by fresh draws.
template <BackendScalar S>
PreservationReport verify_relation_preservation(const PreserverSpec& spec, std::size_t trials, Seed seed,
                                                const Tolerance& tol = {}) {
  if constexpr (is_exact_v<S>) {
    return verify_relation_preservation<S>(as_cone_map<S>(spec, tol), spec.dim, trials, seed, tol);
  } else {
    const auto phi = as_cone_map<S>(spec, tol);
    PreservationReport rep;
    for (std::size_t i = 0; rep.trials < trials && i < kMaxDrawFactor * trials; ++i) {
      const auto [a, b] = sample_test_pair(spec.dim, mix_seed(seed, i));
      if (!float_resolvable(spec, a, b, tol)) {
        ++rep.skipped;
        continue;
      }
      check_pair_preservation(phi, a, b, rep, tol);
    }
    return rep;
  }
}

struct RangeFormReport {
  std::size_t trials = 0;
  std::size_t violation_count = 0;
  std::vector<bool> ranks_covered;
  std::optional<ExactMatrix> counterexample;

  bool passed() const { return violation_count == 0; }
};

/// Default principal-angle tolerance for float range comparisons.
inline constexpr double kRangeAngleTol = 1e-8;

/// Checks ran phi(A) = T(ran A) for sampled A of every rank 0..n.
template <BackendScalar S>
RangeFormReport verify_range_form(const ConeMap<S>& phi, const SemilinearOperator<Exact>& t, std::size_t trials,
                                  Seed seed, const Tolerance& tol = {}, double angle_tol = kRangeAngleTol) {
  const std::size_t n = t.dim();
  RangeFormReport rep;
  rep.ranks_covered.assign(n + 1, false);
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t r = i % (n + 1);
    const auto a = random_psd<Exact>(n, r, mix_seed(seed, i));
    const auto image = range(phi(convert<S>(a, tol)), tol);
    const auto expected = t.apply(range(a));
    bool ok;
    if constexpr (is_exact_v<S>) {
      ok = subspace_equal(image, expected);
    } else {
      ok = subspace_equal_within(image, convert<Approx>(expected), angle_tol);
    }
    ++rep.trials;
    rep.ranks_covered[r] = true;
    if (!ok) {
      ++rep.violation_count;
      if (!rep.counterexample) rep.counterexample = a.matrix();
    }
  }
  return rep;
}

template <BackendScalar S>
RangeFormReport verify_range_form(const PreserverSpec& spec, const SemilinearOperator<Exact>& t, std::size_t trials,
                                  Seed seed, const Tolerance& tol = {}, double angle_tol = kRangeAngleTol) {
  require_same_dim(spec.dim, t.dim(), "verify_range_form");
  return verify_range_form<S>(as_cone_map<S>(spec, tol), t, trials, seed, tol, angle_tol);
}

/// Sampled necessary conditions of the two-dimensional characterization:
/// phi(0) = 0, phi(A) invertible iff A invertible, and rank-one inputs with
/// a common range have rank-one images with a common range.
struct Dim2Report {
  bool zero_fixed = false;
  bool invertibility = false;
  bool rank_one_lines = false;
  std::size_t trials = 0;
  std::string first_failure;
  static constexpr const char* note = "necessary conditions checked on samples; not a full equivalence test";

  bool passed() const { return zero_fixed && invertibility && rank_one_lines; }
};

template <BackendScalar S>
Dim2Report dim2_conditions(const ConeMap<S>& phi, std::size_t dim, std::size_t trials, Seed seed,
                           const Tolerance& tol = {}, double angle_tol = kRangeAngleTol) {
  if (dim != 2) throw InvalidArgument("dim2_conditions: dimension must be 2");
  Dim2Report rep;
  rep.trials = trials;
  rep.zero_fixed = phi(PsdOperator<S>::zero(2)).rank() == 0;
  rep.invertibility = true;
  rep.rank_one_lines = true;
  Rng rng(seed);
  for (std::size_t i = 0; i < trials && rep.invertibility; ++i) {
    const auto a = random_psd<Exact>(2, i % 3, mix_seed(seed, 2 * i));
    const auto fa = phi(convert<S>(a, tol));
    if (is_invertible_positive(a) != is_invertible_positive(fa)) rep.invertibility = false;
  }
  for (std::size_t i = 0; i < trials && rep.rank_one_lines; ++i) {
    std::vector<Exact> f(2);
    do {
      f[0] = Exact(rng.uniform_int(-3, 3), rng.uniform_int(-3, 3));
      f[1] = Exact(rng.uniform_int(-3, 3), rng.uniform_int(-3, 3));
    } while (f[0].is_zero() && f[1].is_zero());
    Exact lambda;
    do lambda = Exact(rng.uniform_int(-3, 3), rng.uniform_int(-3, 3));
    while (lambda.is_zero());
    std::vector<Exact> g = {lambda * f[0], lambda * f[1]};
    const auto a1 = rank_one<Exact>(std::span<const Exact>(f));
    const auto a2 = rank_one<Exact>(std::span<const Exact>(g));
    const auto i1 = phi(convert<S>(a1, tol));
    const auto i2 = phi(convert<S>(a2, tol));
    if (i1.rank() != 1 || i2.rank() != 1) {
      rep.rank_one_lines = false;
      break;
    }
    if constexpr (is_exact_v<S>) {
      rep.rank_one_lines = subspace_equal(range(i1), range(i2));
    } else {
      rep.rank_one_lines = subspace_equal_within(range(i1, tol), range(i2, tol), angle_tol);
    }
  }
  if (!rep.zero_fixed) rep.first_failure = "phi(0) != 0";
  else if (!rep.invertibility) rep.first_failure = "invertible operators not mapped onto invertible operators";
  else if (!rep.rank_one_lines) rep.first_failure = "rank-one inputs with equal ranges have images with different ranges";
  return rep;
}

template <BackendScalar S>
Dim2Report dim2_conditions(const PreserverSpec& spec, std::size_t trials, Seed seed, const Tolerance& tol = {}) {
  if (spec.dim != 2) throw InvalidArgument("dim2_conditions: dimension must be 2");
  return dim2_conditions<S>(as_cone_map<S>(spec, tol), spec.dim, trials, seed, tol);
}

}  // namespace psdcone
