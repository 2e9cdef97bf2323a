#include "helpers.hpp"

using namespace psdcone;
using namespace psdcone::testing;

namespace {

LineMap identity_map(std::size_t n) {
  return {n, [](const Line& l) { return l; }};
}

LineMap conjugation_map(std::size_t n) {
  return {n, [](const Line& l) {
            auto d = l.direction();
            for (auto& x : d) x = x.conj();
            return Line(d);
          }};
}

// Swaps [e1] and [e2]; every other line is fixed.
LineMap swap_map(std::size_t n) {
  return {n, [n](const Line& l) {
            if (l == Line::basis(n, 0)) return Line::basis(n, 1);
            if (l == Line::basis(n, 1)) return Line::basis(n, 0);
            return l;
          }};
}

ExactMatrix three_cycle() {
  ExactMatrix p(3, 3);
  p(1, 0) = Exact(1);
  p(2, 1) = Exact(1);
  p(0, 2) = Exact(1);
  return p;
}

}  // namespace

TEST(Line, Normalization) {
  const Line l({Exact(0), gi(2, 2), Exact(4)});
  EXPECT_EQ(l.direction()[0], Exact(0));
  EXPECT_EQ(l.direction()[1], Exact(1));
  EXPECT_EQ(l.direction()[2], gi(1, -1));
  EXPECT_EQ(l, Line({Exact(0), gi(0, 1), gi(1, 1)}));
  EXPECT_THROW(Line({Exact(0), Exact(0)}), InvalidArgument);
}

TEST(VerifyProjectivity, Examples) {
  EXPECT_TRUE(verify_projectivity(identity_map(3), 50, 1).passed);
  for (Seed s = 0; s < 10; ++s) {
    const auto t = random_semilinear<Exact>(4, s, s % 2 ? Flavor::conjugate : Flavor::linear);
    EXPECT_TRUE(verify_projectivity(line_map_of(t), 30, s).passed);
  }
  const auto rep = verify_projectivity(swap_map(3), 50, 1);
  EXPECT_FALSE(rep.passed);
  EXPECT_FALSE(rep.failure.empty());
}

TEST(VerifyProjectivity, SwapCounterexampleTriple) {
  // [e1], [e1+e3], [e3] are coplanar; their images [e2], [e1+e3], [e3] are not.
  const auto m = swap_map(3);
  std::vector<Line> img{m(Line::basis(3, 0)), m(Line({Exact(1), Exact(0), Exact(1)})), m(Line::basis(3, 2))};
  EXPECT_EQ(detail::rank_of_lines(img), 3u);
}

TEST(VerifyProjectivity, SmallDimensionRejected) {
  EXPECT_THROW(verify_projectivity(identity_map(2), 10, 1), InvalidArgument);
}

TEST(ReconstructSemilinear, Examples) {
  const auto id = reconstruct_semilinear(identity_map(3), 3);
  EXPECT_EQ(id.flavor(), Flavor::linear);
  EXPECT_TRUE(projectively_equal(id.matrix(), ExactMatrix::identity(3)));

  const auto cj = reconstruct_semilinear(conjugation_map(3), 3);
  EXPECT_EQ(cj.flavor(), Flavor::conjugate);
  EXPECT_TRUE(projectively_equal(cj.matrix(), ExactMatrix::identity(3)));

  const SemilinearOperator<Exact> p(three_cycle(), Flavor::linear);
  const auto rp = reconstruct_semilinear(line_map_of(p), 3);
  EXPECT_EQ(rp.flavor(), Flavor::linear);
  EXPECT_TRUE(projectively_equal(rp.matrix(), three_cycle()));
}

TEST(ReconstructSemilinear, RoundTripBothFlavors) {
  for (std::size_t n = 2; n <= 5; ++n) {
    for (Seed s = 0; s < 15; ++s) {
      for (Flavor f : {Flavor::linear, Flavor::conjugate}) {
        const auto t = random_semilinear<Exact>(n, mix_seed(s, n), f);
        const auto m = induced_line_map(PreserverSpec::congruence(t));
        const auto r = reconstruct_semilinear(m, n);
        EXPECT_EQ(r.flavor(), f);
        EXPECT_TRUE(projectively_equal(r.matrix(), t.matrix()));
        EXPECT_EQ(count_reconstruction_mismatches(m, r, 20, s), 0u);
      }
    }
  }
}

TEST(ReconstructSemilinear, DegenerateProbesRejected) {
  EXPECT_THROW(reconstruct_semilinear(swap_map(3), 3), NotSemilinear);
  const LineMap collapse{3, [](const Line&) { return Line::basis(3, 0); }};
  EXPECT_THROW(reconstruct_semilinear(collapse, 3), NotSemilinear);
  EXPECT_THROW(reconstruct_semilinear(identity_map(3), 4), DimensionMismatch);
}

TEST(ReconstructSemilinear, FlavorMismatchRejected) {
  // Fixes every line except [e1 + i e2], which goes to a third candidate.
  const LineMap odd{2, [](const Line& l) {
                      if (l == Line({Exact(1), gi(0, 1)})) return Line({Exact(1), gi(1, 1)});
                      return l;
                    }};
  EXPECT_THROW(reconstruct_semilinear(odd, 2), NotSemilinear);
}

TEST(InducedLineMap, CongruenceMatchesT) {
  const auto t = random_semilinear<Exact>(3, 41, Flavor::conjugate);
  const auto m = induced_line_map(PreserverSpec::congruence(t));
  const auto ref = line_map_of(t);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Line l(detail::random_vector(3, rng));
    EXPECT_EQ(m(l), ref(l));
  }
}

TEST(InducedLineMap, FormIvMatchesCongruence) {
  for (Seed s = 0; s < 10; ++s) {
    const auto t = random_semilinear<Exact>(3, s, s % 2 ? Flavor::conjugate : Flavor::linear);
    const auto mf = induced_line_map(PreserverSpec::form_iv(t, ZFamily{s, {}}));
    const auto mc = induced_line_map(PreserverSpec::congruence(t));
    Rng rng(s);
    for (int i = 0; i < 10; ++i) {
      const Line l(detail::random_vector(3, rng));
      EXPECT_EQ(mf(l), mc(l));
    }
    EXPECT_TRUE(verify_projectivity(mf, 20, s).passed);
  }
}

TEST(InducedLineMap, NonRankOneImageRejected) {
  // A singular T (set directly, skipping validation) sends f f* to 0 for f in ker T.
  PreserverSpec bogus = PreserverSpec::congruence(SemilinearOperator<Exact>(ExactMatrix::identity(2), Flavor::linear));
  bogus.t = ones(2);
  const auto m = induced_line_map(bogus);
  EXPECT_NO_THROW(m(Line::basis(2, 0)));
  EXPECT_THROW(m(Line({Exact(1), Exact(-1)})), NotSemilinear);
}

TEST(InducedLineMap, InjectiveOnSamples) {
  const auto t = random_semilinear<Exact>(4, 2, Flavor::linear);
  const auto m = induced_line_map(PreserverSpec::congruence(t));
  Rng rng(3);
  std::vector<Line> src, dst;
  for (int i = 0; i < 30; ++i) {
    src.emplace_back(detail::random_vector(4, rng));
    dst.push_back(m(src.back()));
  }
  for (std::size_t i = 0; i < src.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (!(src[i] == src[j])) EXPECT_FALSE(dst[i] == dst[j]);
}

TEST(ProjectivelyEqual, Basics) {
  const auto t = random_semilinear<Exact>(3, 1, Flavor::linear).matrix();
  EXPECT_TRUE(projectively_equal(t * gi(2, -3), t));
  EXPECT_FALSE(projectively_equal(ExactMatrix(t + ExactMatrix::identity(3)), t));
}

TEST(Rationalize, RecoversSmallRationals) {
  EXPECT_EQ(detail::best_rational(0.375, 1000000), mpq_class(3, 8));
  EXPECT_EQ(detail::best_rational(-2.0 / 7.0, 1000000), mpq_class(-2, 7));
}
