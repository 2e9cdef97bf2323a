#pragma once

#include <optional>
#include <string>

#include "psdcone/generators.hpp"
#include "psdcone/relations.hpp"

namespace psdcone {

/// Relative level used by the decomposition when the caller passes the
/// default tolerance. Rank decisions on the parts are measured against
/// the norm of the decomposed operator.
inline constexpr double kLebesgueRel = 1e-10;

namespace detail {

inline Tolerance lebesgue_tolerance(const PsdOperator<Approx>& a, const Tolerance& tol) {
  const double rel = tol.rel >= 0 ? tol.rel : kLebesgueRel;
  const double ref = tol.ref_norm >= 0 ? tol.ref_norm : spectral_norm(a.matrix());
  return {rel, ref};
}

}  // namespace detail

struct LebesgueDecomposition {
  PsdOperator<Approx> ac_part;
  PsdOperator<Approx> singular_part;
  PsdOperator<Approx> base;
};

/// {x : a^{1/2} x ∈ ran b}.
inline Subspace<Approx> ac_domain(const PsdOperator<Approx>& a, const PsdOperator<Approx>& b,
                                  const Tolerance& tol = {}) {
  require_same_dim(a.dim(), b.dim(), "ac_domain");
  return subspace_preimage(psd_sqrt(a, tol).matrix(), range(b, tol), tol);
}

/// a = a^{1/2} P a^{1/2} + a^{1/2} (I - P) a^{1/2}, with P the orthogonal
/// projection onto ac_domain(a, b). The first part is the largest C <= a
/// with C ≪ b.
inline LebesgueDecomposition decompose(const PsdOperator<Approx>& a, const PsdOperator<Approx>& b,
                                       const Tolerance& tol = {}) {
  require_same_dim(a.dim(), b.dim(), "decompose");
  const Tolerance part_tol = detail::lebesgue_tolerance(a, tol);
  const auto root = psd_sqrt(a).matrix();
  const auto p = orthogonal_projection(ac_domain(a, b));
  ApproxMatrix ac = hermitian_part(ApproxMatrix(root * p * root));
  ApproxMatrix sing = hermitian_part(ApproxMatrix(a.matrix() - ac));
  // Parts below the tolerance are round-off; return them as exact zeros.
  const double negligible = part_tol.threshold(1, 1, 0.0);
  if (spectral_norm(ac) <= negligible) ac = ApproxMatrix::zeros(a.dim(), a.dim());
  if (spectral_norm(sing) <= negligible) sing = ApproxMatrix::zeros(a.dim(), a.dim());
  return {PsdOperator<Approx>(ac, part_tol), PsdOperator<Approx>(sing, part_tol), b};
}

struct DecompositionReport {
  bool sum_ok = false;
  bool ac_ok = false;
  bool singular_ok = false;
  bool maximality_ok = false;
  double sum_error = 0;
  std::size_t trials = 0;
  std::size_t kept = 0;          ///< contractions whose C passed the C ≪ base filter
  std::size_t violations = 0;
  std::optional<ApproxMatrix> counterexample;  ///< first C with C not <= ac + eps I
  std::string failure;

  bool passed() const { return sum_ok && ac_ok && singular_ok && maximality_ok; }
};

/// Absolute slack in C <= ac_part + kMaximalitySlack * I.
inline constexpr double kMaximalitySlack = 1e-8;
/// Relative tolerance of the sum, ≪ and ⊥ checks.
inline constexpr double kDecompositionCheckRel = 1e-8;

namespace detail {

inline ApproxMatrix random_unitary(std::size_t n, Rng& rng) {
  const auto g = to_eigen(random_complex_normal_matrix(n, n, rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  return from_eigen(qr.householderQ() * Eigen::MatrixXcd::Identity(n, n));
}

/// Random PSD contraction supported on the column span of `span`
/// (orthonormal columns). With `extreme` set the top eigenvalue is exactly 1.
inline ApproxMatrix random_contraction(const Eigen::MatrixXcd& span, Rng& rng, bool extreme) {
  const auto k = span.cols();
  if (k == 0) return ApproxMatrix(span.rows(), span.rows());
  const auto w = to_eigen(random_unitary(static_cast<std::size_t>(k), rng));
  Eigen::VectorXd d(k);
  for (Eigen::Index i = 0; i < k; ++i) d(i) = extreme ? (rng.coin() ? 1.0 : rng.uniform01()) : rng.uniform01();
  if (extreme) d(0) = 1.0;
  const Eigen::MatrixXcd q = span * w;
  return from_eigen(q * d.asDiagonal() * q.adjoint());
}

/// Orthonormal basis of the columns of m (thin QR with rank from SVD).
inline Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& m, double rel) {
  if (m.cols() == 0) return m;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rel * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace detail

/// Checks the sum, ≪ and ⊥ invariants, then probes maximality: random PSD
/// contractions R give C = a^{1/2} R a^{1/2} <= a; every such C with C ≪ base
/// must satisfy C <= ac_part + 1e-8 I.
///
/// The sampler does not reuse the construction. Candidate directions come
/// from principal vectors of ran a against ran b (cosine ~ 1), pulled back
/// through a^{1/2} by its pseudoinverse, optionally mixed with ker a; half the
/// trials use unconstrained contractions instead.
inline DecompositionReport verify_decomposition(const LebesgueDecomposition& d, const PsdOperator<Approx>& a,
                                                std::size_t trials, Seed seed) {
  DecompositionReport rep;
  rep.trials = trials;
  const std::size_t n = a.dim();
  const double scale = std::max({1.0, spectral_norm(a.matrix()), spectral_norm(d.base.matrix())});
  const Tolerance check{kDecompositionCheckRel, scale};

  rep.sum_error = max_abs(ApproxMatrix(d.ac_part.matrix() + d.singular_part.matrix() - a.matrix()));
  rep.sum_ok = rep.sum_error <= kDecompositionCheckRel * scale;
  rep.ac_ok = is_abs_continuous(d.ac_part, d.base, check);
  rep.singular_ok = is_singular(d.singular_part, d.base, check);
  if (!rep.sum_ok) rep.failure = "sum: ac_part + singular_part differs from a";
  else if (!rep.ac_ok) rep.failure = "ac_part is not base-absolutely continuous";
  else if (!rep.singular_ok) rep.failure = "singular_part is not singular to base";

  // Oracle ingredients, computed from eigendecompositions only.
  const auto ea = eigh(a.matrix());
  const auto eb = eigh(d.base.matrix());
  const double amax = std::max(0.0, ea.values.size() ? ea.values.maxCoeff() : 0.0);
  const double bmax = std::max(0.0, eb.values.size() ? eb.values.maxCoeff() : 0.0);
  std::vector<Eigen::Index> a_range, a_null, b_range;
  for (Eigen::Index i = 0; i < ea.values.size(); ++i)
    (ea.values(i) > 1e-10 * amax ? a_range : a_null).push_back(i);
  for (Eigen::Index i = 0; i < eb.values.size(); ++i)
    if (eb.values(i) > 1e-10 * bmax) b_range.push_back(i);
  Eigen::VectorXd root_vals(n), root_inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = std::max(0.0, ea.values(i));
    root_vals(i) = std::sqrt(l);
    root_inv(i) = l > 1e-10 * amax ? 1.0 / std::sqrt(l) : 0.0;
  }
  const Eigen::MatrixXcd root = ea.vectors * root_vals.asDiagonal() * ea.vectors.adjoint();
  const Eigen::MatrixXcd root_pinv = ea.vectors * root_inv.asDiagonal() * ea.vectors.adjoint();
  Eigen::MatrixXcd qa(n, a_range.size()), qnull(n, a_null.size()), qb(n, b_range.size());
  for (std::size_t k = 0; k < a_range.size(); ++k) qa.col(k) = ea.vectors.col(a_range[k]);
  for (std::size_t k = 0; k < a_null.size(); ++k) qnull.col(k) = ea.vectors.col(a_null[k]);
  for (std::size_t k = 0; k < b_range.size(); ++k) qb.col(k) = eb.vectors.col(b_range[k]);

  // Principal vectors of ran a against ran b with cosine 1 span the
  // intersection.
  Eigen::MatrixXcd common(n, 0);
  if (qa.cols() > 0 && qb.cols() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(qa.adjoint() * qb, Eigen::ComputeFullU);
    Eigen::Index k = 0;
    while (k < svd.singularValues().size() && svd.singularValues()(k) > 1.0 - 1e-9) ++k;
    common = qa * svd.matrixU().leftCols(k);
  }
  const Eigen::MatrixXcd pulled = root_pinv * common;

  Rng rng(seed);
  const Eigen::MatrixXcd ac = detail::to_eigen(d.ac_part.matrix());
  for (std::size_t t = 0; t < trials; ++t) {
    ApproxMatrix r;
    if (rng.coin()) {
      r = detail::random_contraction(Eigen::MatrixXcd::Identity(n, n), rng, rng.coin());
    } else {
      // Random subset of pulled-back intersection directions, plus kernel noise.
      Eigen::MatrixXcd dirs(n, 0);
      if (pulled.cols() > 0) {
        const auto m = static_cast<Eigen::Index>(rng.uniform_int(1, static_cast<long>(pulled.cols())));
        const auto mix = detail::to_eigen(random_complex_normal_matrix(pulled.cols(), m, rng));
        dirs = pulled * mix;
        if (qnull.cols() > 0 && rng.coin())
          dirs += qnull * detail::to_eigen(random_complex_normal_matrix(qnull.cols(), m, rng));
      }
      r = detail::random_contraction(detail::orthonormalize(dirs, 1e-12), rng, true);
    }
    const Eigen::MatrixXcd c_e = root * detail::to_eigen(r) * root;
    const ApproxMatrix c = hermitian_part(detail::from_eigen(c_e));
    const PsdOperator<Approx> cop(c, check.with_ref(scale));
    if (!is_abs_continuous(cop, d.base, check)) continue;
    ++rep.kept;
    const ApproxMatrix slack =
        detail::from_eigen(ac + kMaximalitySlack * Eigen::MatrixXcd::Identity(n, n) - c_e);
    if (lambda_min(slack) < 0.0) {
      ++rep.violations;
      if (!rep.counterexample) rep.counterexample = c;
    }
  }
  rep.maximality_ok = rep.violations == 0;
  if (rep.failure.empty() && !rep.maximality_ok) rep.failure = "maximality: C <= a, C ≪ b but C not <= ac_part";
  return rep;
}

}  // namespace psdcone
