#include "helpers.hpp"

using namespace psdcone;
using namespace psdcone::testing;

TEST(GaussianRational, StoredInLowestTerms) {
  const Exact x(mpq_class(6, 4), mpq_class(-10, -20));
  EXPECT_EQ(x.re(), mpq_class(3, 2));
  EXPECT_EQ(x.re().get_den(), 2);
  EXPECT_EQ(x.im().get_num(), 1);
  EXPECT_EQ(x.im().get_den(), 2);
}

TEST(GaussianRational, FieldArithmetic) {
  const Exact a = gi(1, 2), b = gi(3, -1);
  EXPECT_EQ(a * b, gi(5, 5));
  EXPECT_EQ(a + b, gi(4, 1));
  EXPECT_EQ(a - b, gi(-2, 3));
  EXPECT_EQ((a / b) * b, a);
  EXPECT_EQ(a * a.conj(), Exact(5));
  EXPECT_EQ(a.norm2(), mpq_class(5));
  EXPECT_EQ(Exact(1) / gi(0, 1), gi(0, -1));
}

TEST(GaussianRational, ComplexRoundTrip) {
  const Exact x = Exact::from_complex({0.375, -2.5});
  EXPECT_EQ(x, Exact(mpq_class(3, 8), mpq_class(-5, 2)));
  EXPECT_EQ(x.to_complex(), Approx(0.375, -2.5));
}

TEST(Matrix, ProductAndAdjoint) {
  const ExactMatrix a{{gi(1, 1), Exact(2)}, {Exact(0), gi(0, -1)}};
  const ExactMatrix aa = a * a.adjoint();
  EXPECT_EQ(aa(0, 0), Exact(6));
  EXPECT_EQ(aa(0, 1), gi(0, 2));
  EXPECT_EQ(aa(1, 1), Exact(1));
  EXPECT_EQ(aa(1, 0), aa(0, 1).conj());
  EXPECT_EQ(aa, aa.adjoint());
  EXPECT_EQ(a.adjoint().adjoint(), a);
}

TEST(Matrix, ZeroDimensionsAndStacking) {
  const ExactMatrix empty(3, 0);
  const auto h = hstack(empty, ExactMatrix::identity(3));
  EXPECT_EQ(h, ExactMatrix::identity(3));
  EXPECT_EQ((ExactMatrix(2, 0) * ExactMatrix(0, 2)), ExactMatrix::zeros(2, 2));
}

TEST(Matrix, DimensionMismatchThrows) {
  EXPECT_THROW(ExactMatrix::identity(2) * ExactMatrix::identity(3), DimensionMismatch);
  EXPECT_THROW(ExactMatrix::identity(2) + ExactMatrix::identity(3), DimensionMismatch);
}

TEST(Matrix, ConvertBetweenBackends) {
  const ExactMatrix m{{q(1, 2), gi(0, 3)}, {gi(0, -3), q(-7, 4)}};
  const auto f = convert<Approx>(m);
  EXPECT_EQ(f(0, 1), Approx(0, 3));
  EXPECT_EQ(convert<Exact>(f), m);
}
