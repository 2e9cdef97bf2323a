#include "helpers.hpp"

using namespace psdcone;
using namespace psdcone::testing;

namespace {

const Exact e0 = Exact(0);
const Exact e1 = Exact(1);

ExactMatrix random_exact(std::size_t r, std::size_t c, Seed seed) {
  Rng rng(seed);
  return random_gaussian_integer_matrix(r, c, rng);
}

}  // namespace

TEST(Rank, Examples) {
  EXPECT_EQ(rank(ExactMatrix::zeros(3, 3)), 0u);
  EXPECT_EQ(rank(ExactMatrix::identity(4)), 4u);
  EXPECT_EQ(rank(ones(2)), 1u);
  EXPECT_EQ(rank(ApproxMatrix::zeros(3, 3)), 0u);
  EXPECT_EQ(rank(ApproxMatrix::identity(4)), 4u);
  EXPECT_EQ(rank(convert<Approx>(ones(2))), 1u);
}

TEST(Rank, ToleranceOverride) {
  const auto m = fdiag({1.0, 1e-9});
  EXPECT_EQ(rank(m), 2u);
  EXPECT_EQ(rank(m, Tolerance{1e-6}), 1u);
}

TEST(Rank, FractionFreePivotsMatchRref) {
  for (Seed s = 0; s < 60; ++s) {
    const std::size_t r = 1 + s % 5, c = 2 + s % 7, k = s % (std::min(r, c) + 1);
    // rank-k product with rational rows and a zero column spliced in
    ExactMatrix m = random_exact(r, k, s) * random_exact(k, c, s + 100);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) *= gi(static_cast<long>(i) + 1, 0) / Exact(static_cast<long>(j) + 2);
    if (c > 2) m = hstack(m, ExactMatrix(r, 1));
    EXPECT_EQ(detail::echelon_pivots(m), detail::rref(m).pivots) << m;
    EXPECT_LE(rank(m), k);
  }
}

TEST(ColumnSpace, Examples) {
  const auto u = column_space(ones(2));
  EXPECT_EQ(u.dim(), 1u);
  EXPECT_TRUE(subspace_equal(u, span({{1, 1}}, 2)));

  const auto v = column_space(ediag({1, 0, 2}));
  EXPECT_TRUE(subspace_equal(v, span({{1, 0, 0}, {0, 0, 1}}, 3)));
  EXPECT_EQ(v.codim(), 1u);
}

TEST(ColumnSpace, InvariantUnderColumnOperations) {
  for (Seed s = 0; s < 30; ++s) {
    const auto m = random_exact(4, 3, s);
    const auto g = random_semilinear<Exact>(3, s + 100, Flavor::linear).matrix();
    EXPECT_TRUE(subspace_equal(column_space(m), column_space(m * g)));
    const auto fm = convert<Approx>(m);
    EXPECT_TRUE(subspace_equal(column_space(fm), column_space(fm * convert<Approx>(g))));
  }
}

TEST(SubspaceSum, Examples) {
  const auto s = subspace_sum(span({{1, 0, 0}}, 3), span({{0, 1, 0}}, 3));
  EXPECT_TRUE(subspace_equal(s, span({{1, 0, 0}, {0, 1, 0}}, 3)));

  const auto u = span({{1, 2, 3}}, 3);
  EXPECT_TRUE(subspace_equal(subspace_sum(u, Subspace<Exact>::zero(3)), u));

  const auto full = subspace_sum(span({{1, 1}}, 2), span({{1, -1}}, 2));
  EXPECT_EQ(full.dim(), 2u);
}

TEST(SubspaceSum, AmbientMismatch) {
  EXPECT_THROW(subspace_sum(Subspace<Exact>::full(2), Subspace<Exact>::full(3)), DimensionMismatch);
  EXPECT_THROW(subspace_intersect(Subspace<Exact>::full(2), Subspace<Exact>::full(3)), DimensionMismatch);
}

TEST(SubspaceIntersect, Examples) {
  const auto i = subspace_intersect(span({{1, 0, 0}, {0, 1, 0}}, 3), span({{0, 1, 0}, {0, 0, 1}}, 3));
  EXPECT_TRUE(subspace_equal(i, span({{0, 1, 0}}, 3)));

  EXPECT_EQ(subspace_intersect(span({{1, 1}}, 2), span({{1, 0}}, 2)).dim(), 0u);

  const auto u = span({{1, 2, 0, 1}, {0, 1, 1, 1}}, 4);
  EXPECT_TRUE(subspace_equal(subspace_intersect(u, u), u));
}

TEST(SubspaceIntersect, DimensionFormulaBothBackends) {
  for (Seed s = 0; s < 60; ++s) {
    Rng rng(s);
    const auto n = static_cast<std::size_t>(rng.uniform_int(2, 5));
    const auto k1 = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(n)));
    const auto k2 = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(n)));
    // Share a common block so that intersections are frequently nontrivial.
    const auto common = random_exact(n, std::min(k1, k2) / 2, s + 1);
    const auto a = hstack(common, random_exact(n, k1 - common.cols(), s + 2));
    const auto b = hstack(common, random_exact(n, k2 - common.cols(), s + 3));
    const auto u = column_space(a), v = column_space(b);
    EXPECT_EQ(subspace_intersect(u, v).dim() + subspace_sum(u, v).dim(), u.dim() + v.dim());
    const auto fu = column_space(convert<Approx>(a)), fv = column_space(convert<Approx>(b));
    EXPECT_EQ(subspace_intersect(fu, fv).dim() + subspace_sum(fu, fv).dim(), fu.dim() + fv.dim());
    EXPECT_EQ(subspace_intersect(fu, fv).dim(), subspace_intersect(u, v).dim());
  }
}

TEST(SubspacePreimage, Examples) {
  const auto m = random_exact(3, 3, 5);
  EXPECT_EQ(subspace_preimage(m, Subspace<Exact>::full(3)).dim(), 3u);

  const auto t = random_semilinear<Exact>(3, 9, Flavor::linear).matrix();
  EXPECT_EQ(subspace_preimage(t, Subspace<Exact>::zero(3)).dim(), 0u);
}

TEST(SubspacePreimage, SquareRootOfOnesAgainstFirstAxis) {
  // m = ones(2)^{1/2} = ones(2)/sqrt(2); m x lies in span{e1} iff x1 + x2 = 0.
  const double r = 1.0 / std::sqrt(2.0);
  const ApproxMatrix m{{r, r}, {r, r}};
  const auto p = subspace_preimage(m, column_space(fdiag({1, 0})));
  ASSERT_EQ(p.dim(), 1u);
  const ApproxMatrix expected{{1.0}, {-1.0}};
  EXPECT_TRUE(subspace_equal_within(p, column_space(expected), 1e-12));
  // Oracle: the basis vector is annihilated by m.
  EXPECT_LT(max_abs(m * p.basis()), 1e-12);
}

TEST(SubspacePreimage, ContainsKernel) {
  for (Seed s = 0; s < 20; ++s) {
    const auto m = random_exact(4, 2, s) * random_exact(2, 4, s + 50);
    const auto v = column_space(random_exact(4, 1, s + 99));
    const auto pre = subspace_preimage(m, v);
    EXPECT_TRUE(subspace_contains(pre, column_space(kernel(m))));
  }
}

TEST(PsdCheck, Examples) {
  const ExactMatrix a{{e1, -e1}, {-e1, e1}};
  const ExactMatrix b{{e0, e1}, {e1, e0}};
  EXPECT_TRUE(psd_check(a));
  EXPECT_FALSE(psd_check(b));
  EXPECT_FALSE(psd_check(ExactMatrix(-ExactMatrix::identity(3))));
  EXPECT_TRUE(psd_check(convert<Approx>(a)));
  EXPECT_FALSE(psd_check(convert<Approx>(b)));
  EXPECT_FALSE(psd_check(ApproxMatrix(-ApproxMatrix::identity(3))));
}

TEST(PsdCheck, NonHermitianIsFalse) {
  const ExactMatrix m{{e1, e1}, {e0, e1}};
  EXPECT_FALSE(psd_check(m));
  const ExactMatrix h{{e1, gi(0, 1)}, {gi(0, 1), e1}};
  EXPECT_FALSE(psd_check(h));
}

TEST(PsdCheck, SingularWithZeroPivotAndNonzeroOffDiagonal) {
  // Zero diagonal with nonzero coupling is indefinite.
  const ExactMatrix m{{e1, e0, e0}, {e0, e0, e1}, {e0, e1, e0}};
  EXPECT_FALSE(psd_check(m));
  // Gram matrices are PSD regardless of rank.
  for (Seed s = 0; s < 30; ++s) {
    const auto g = random_exact(4, static_cast<std::size_t>(s % 5), s);
    EXPECT_TRUE(psd_check(ExactMatrix(g * g.adjoint())));
  }
}

TEST(PsdCheck, AgreesWithEigenvaluesOnRandomHermitian) {
  for (Seed s = 0; s < 100; ++s) {
    const auto g = random_exact(3, 3, s);
    // Shifted Hermitian matrices straddle the PSD boundary.
    ExactMatrix h = g + g.adjoint();
    const auto shift = Exact(static_cast<long>(s % 7));
    for (std::size_t i = 0; i < 3; ++i) h(i, i) += shift;
    const double lmin = lambda_min(convert<Approx>(h));
    if (std::abs(lmin) < 1e-9) continue;
    EXPECT_EQ(psd_check(h), lmin > 0) << "seed " << s;
  }
}

TEST(PsdSqrt, Examples) {
  const auto s = psd_sqrt(fpsd(fdiag({4, 9})));
  EXPECT_LT(dist(s.matrix(), fdiag({2, 3})), 1e-12);

  const auto r = psd_sqrt(fpsd(ones(2)));
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_LT(dist(r.matrix(), ApproxMatrix{{h, h}, {h, h}}), 1e-12);
  EXPECT_EQ(r.rank(), 1u);

  EXPECT_EQ(psd_sqrt(PsdOperator<Approx>::zero(3)).rank(), 0u);
  EXPECT_EQ(max_abs(psd_sqrt(PsdOperator<Approx>::zero(3)).matrix()), 0.0);
}

TEST(PsdSqrt, ExactBackendRejected) { EXPECT_THROW(psd_sqrt(epsd(ones(2))), BackendError); }

TEST(PsdSqrt, SquaresBackAndKeepsRank) {
  for (Seed s = 0; s < 40; ++s) {
    const auto a = random_psd<Approx>(4, s % 5, s);
    const auto r = psd_sqrt(a);
    EXPECT_LT(dist(r.matrix() * r.matrix(), a.matrix()), 1e-9 * std::max(1.0, spectral_norm(a.matrix())));
    EXPECT_EQ(r.rank(), a.rank());
  }
}

TEST(Pinv, Examples) {
  const auto t = random_semilinear<Exact>(3, 4, Flavor::linear).matrix();
  EXPECT_EQ(pinv(t), inverse(t));
  const ExactMatrix d{{Exact(2), e0}, {e0, e0}};
  EXPECT_EQ(pinv(d), (ExactMatrix{{q(1, 2), e0}, {e0, e0}}));
  EXPECT_EQ(pinv(pinv(ones(2))), ones(2));
  EXPECT_EQ(pinv(ones(2)), ExactMatrix(ones(2) * q(1, 4)));
}

TEST(Pinv, PenroseIdentitiesExact) {
  for (Seed s = 0; s < 40; ++s) {
    const auto m = checks::random_low_rank(4, 3, s);
    EXPECT_TRUE(checks::penrose_identities(m)) << "seed " << s;
  }
  EXPECT_TRUE(checks::penrose_identities(ExactMatrix::zeros(2, 3)));
}

TEST(Pinv, PenroseIdentitiesApprox) {
  for (Seed s = 0; s < 40; ++s) {
    const auto m = convert<Approx>(checks::random_low_rank(4, 3, s));
    const auto p = pinv(m);
    const double tol = 1e-9 * std::max(1.0, spectral_norm(m)) * std::max(1.0, spectral_norm(p));
    EXPECT_LT(dist(m * p * m, m), tol);
    EXPECT_LT(dist(p * m * p, p), tol);
    EXPECT_LT(dist((m * p).adjoint(), m * p), tol);
    EXPECT_LT(dist((p * m).adjoint(), p * m), tol);
  }
}

TEST(DouglasFactor, Examples) {
  const auto b = fpsd(ExactMatrix{{Exact(2), e1}, {e1, Exact(3)}});
  EXPECT_LT(dist(douglas_factor(b, b), ApproxMatrix::identity(2)), 1e-12);

  const auto x = douglas_factor(fpsd(fdiag({1, 0})), fpsd(fdiag({4, 0})));
  EXPECT_LT(dist(x, fdiag({0.5, 0})), 1e-12);

  EXPECT_THROW(douglas_factor(fpsd(fdiag({1, 1})), fpsd(fdiag({1, 0}))), NoFactor);
}

TEST(DouglasFactor, SolvesFactorEquation) {
  for (Seed s = 0; s < 30; ++s) {
    const auto [ea, eb] = random_pair_with_relation<Exact>(3, PairRelation::ac, s);
    const auto a = convert<Approx>(ea), b = convert<Approx>(eb);
    const auto x = douglas_factor(a, b);
    const auto lhs = psd_sqrt(b).matrix() * x;
    EXPECT_LT(dist(lhs, psd_sqrt(a).matrix()), 1e-8 * std::max(1.0, spectral_norm(a.matrix())));
  }
}

TEST(RangeEquality, ColumnSpaceOfGram) {
  for (Seed s = 0; s < 50; ++s) {
    const auto m = random_exact(4, static_cast<std::size_t>(s % 6), s);
    EXPECT_TRUE(subspace_equal(column_space(m), column_space(ExactMatrix(m * m.adjoint()))));
    const auto f = convert<Approx>(m);
    EXPECT_TRUE(subspace_equal(column_space(f), column_space(ApproxMatrix(f * f.adjoint()))));
  }
}

TEST(BackendAgreement, RankOnIntegerInputs) {
  for (Seed s = 0; s < 100; ++s) {
    const auto m = checks::random_low_rank(4, 4, s);
    if (checks::condition_ratio(m) <= kConditionFloor) continue;
    EXPECT_EQ(rank(m), rank(convert<Approx>(m))) << "seed " << s;
  }
}

TEST(Determinant, MatchesFloat) {
  for (Seed s = 0; s < 20; ++s) {
    const auto m = random_exact(3, 3, s);
    const auto d = determinant(m).to_complex();
    const Eigen::MatrixXcd e = detail::to_eigen(convert<Approx>(m));
    EXPECT_NEAR(std::abs(d - e.determinant()), 0.0, 1e-9 * std::max(1.0, std::abs(d)));
  }
}
