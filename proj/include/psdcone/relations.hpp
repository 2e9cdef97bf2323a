#pragma once

#include <optional>

#include "psdcone/psd.hpp"

namespace psdcone {

/// Löwner order: a <= b iff b - a is PSD. On the approx backend the PSD test
/// is measured against the larger of the two norms, not the difference.
template <BackendScalar S>
bool leq(const PsdOperator<S>& a, const PsdOperator<S>& b, const Tolerance& tol = {}) {
  require_same_dim(a.dim(), b.dim(), "leq");
  const Matrix<S> diff = b.matrix() - a.matrix();
  if constexpr (is_exact_v<S>) {
    return psd_check(diff);
  } else {
    if (tol.ref_norm >= 0) return psd_check(diff, tol);
    const double ref = std::max(spectral_norm(a.matrix()), spectral_norm(b.matrix()));
    return psd_check(diff, tol.with_ref(ref));
  }
}

/// a ⊥ b iff ran a ∩ ran b = {0}.
template <BackendScalar S>
bool is_singular(const PsdOperator<S>& a, const PsdOperator<S>& b, const Tolerance& tol = {}) {
  require_same_dim(a.dim(), b.dim(), "is_singular");
  return subspace_intersect(range(a, tol), range(b, tol), tol).dim() == 0;
}

/// The three range relations of a pair.
struct PairRelations {
  bool ac_ab = false;
  bool ac_ba = false;
  bool singular = false;
};

/// All three relations from j = dim(ran A + ran B): A ≪ B iff j = rank B,
/// B ≪ A iff j = rank A, A ⊥ B iff j = rank A + rank B.
template <BackendScalar S>
PairRelations range_relations(const Subspace<S>& ra, const Subspace<S>& rb, const Tolerance& tol = {}) {
  const std::size_t da = ra.dim(), db = rb.dim();
  const std::size_t j =
      da == 0 || db == 0 ? da + db : rank(hstack(ra.basis(), rb.basis()), tol.relative_only());
  return {j == db, j == da, j == da + db};
}

/// a ≪ b iff ran a ⊆ ran b (all ranges are closed in finite dimension).
template <BackendScalar S>
bool is_abs_continuous(const PsdOperator<S>& a, const PsdOperator<S>& b, const Tolerance& tol = {}) {
  require_same_dim(a.dim(), b.dim(), "is_abs_continuous");
  return subspace_contains(range(b, tol), range(a, tol), tol);
}

template <BackendScalar S>
bool same_range_class(const PsdOperator<S>& a, const PsdOperator<S>& b, const Tolerance& tol = {}) {
  require_same_dim(a.dim(), b.dim(), "same_range_class");
  return subspace_equal(range(a, tol), range(b, tol), tol);
}

template <BackendScalar S>
bool is_invertible_positive(const PsdOperator<S>& a) {
  return a.rank() == a.dim();
}

/// Least c >= 0 with a <= c b, or nullopt when a is not b-absolutely
/// continuous. Computed as lambda_max(R a R) with R = (b^{1/2})^+.
template <BackendScalar S>
std::optional<double> min_domination_constant(const PsdOperator<S>& a, const PsdOperator<S>& b,
                                              const Tolerance& tol = {}) {
  require_same_dim(a.dim(), b.dim(), "min_domination_constant");
  if (!is_abs_continuous(a, b, tol)) return std::nullopt;
  if (a.rank() == 0) return 0.0;
  const auto fa = convert<Approx>(a);
  const auto fb = convert<Approx>(b);
  const auto r = pinv(psd_sqrt(fb).matrix());
  return std::max(0.0, lambda_max(r * fa.matrix() * r));
}

struct RelationReport {
  bool leq_ab = false;
  bool leq_ba = false;
  bool abs_cont_ab = false;
  bool abs_cont_ba = false;
  bool singular = false;
  bool same_range_class = false;
  std::optional<double> min_domination_constant;
  std::size_t rank_a = 0;
  std::size_t rank_b = 0;
  std::size_t dim_range_sum = 0;
  std::size_t dim_range_intersection = 0;
};

template <BackendScalar S>
RelationReport analyze_pair(const PsdOperator<S>& a, const PsdOperator<S>& b, const Tolerance& tol = {}) {
  require_same_dim(a.dim(), b.dim(), "analyze_pair");
  const auto ra = range(a, tol);
  const auto rb = range(b, tol);
  RelationReport r;
  r.leq_ab = leq(a, b, tol);
  r.leq_ba = leq(b, a, tol);
  r.abs_cont_ab = subspace_contains(rb, ra, tol);
  r.abs_cont_ba = subspace_contains(ra, rb, tol);
  r.rank_a = ra.dim();
  r.rank_b = rb.dim();
  r.dim_range_sum = subspace_sum(ra, rb, tol).dim();
  r.dim_range_intersection = subspace_intersect(ra, rb, tol).dim();
  r.singular = r.dim_range_intersection == 0;
  r.same_range_class = r.abs_cont_ab && r.abs_cont_ba;
  r.min_domination_constant = min_domination_constant(a, b, tol);
  return r;
}

}  // namespace psdcone
