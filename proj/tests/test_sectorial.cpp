#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hk/gen.hpp"
#include "hk/sectorial.hpp"
#include "oracles.hpp"

using hk::CMatrix;
using hk::Complex;

namespace {

CMatrix diag(std::initializer_list<double> d) {
  CMatrix m = CMatrix::Zero(d.size(), d.size());
  int i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

// Brute-force sup of w(s) ||(a + s)^{-1}|| on a dense log grid, norms from the Hermitian oracle.
double brute_force(const CMatrix& a, bool invertible, double s_lo, double s_hi, int n) {
  double best = invertible ? oracle::norm2(a.inverse()) : 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = std::exp(std::log(s_lo) + (std::log(s_hi) - std::log(s_lo)) * i / (n - 1));
    const CMatrix r = (a + s * CMatrix::Identity(a.rows(), a.cols())).inverse();
    best = std::max(best, (invertible ? 1.0 + s : s) * oracle::norm2(r));
  }
  return std::max(1.0, best);
}

}  // namespace

TEST(CertifyInvertible, IdentityAndDiagonal) {
  EXPECT_NEAR(hk::certify_invertible_sectorial(hk::identity(3)).constant, 1.0, 1e-14);
  const auto c = hk::certify_invertible_sectorial(diag({1, 2}));
  EXPECT_NEAR(c.constant, 1.0, 1e-14);
  EXPECT_NEAR(c.angle, std::numbers::pi / 6, 1e-14);
  EXPECT_NEAR(c.radius, 0.5, 1e-15);
  EXPECT_TRUE(c.refined);
}

TEST(CertifyInvertible, JordanMatchesBruteForce) {
  CMatrix a = hk::identity(2);
  a(0, 1) = 10.0;
  const auto c = hk::certify_invertible_sectorial(a);
  const double ref = brute_force(a, true, 1e-4, 1e4, 100000);
  EXPECT_NEAR(c.constant, ref, 1e-6 * ref);
  for (const auto& p : c.scan) EXPECT_LE(p.value, c.constant);
  EXPECT_NEAR(c.angle, std::asin(1.0 / (2.0 * c.constant)), 1e-14);
}

TEST(CertifyInvertible, SingularRaises) {
  try {
    hk::certify_invertible_sectorial(diag({0.0, 1.0}));
    FAIL();
  } catch (const hk::ResolventSingularError& e) {
    EXPECT_EQ(e.shift(), 0.0);
  }
}

TEST(CertifySectorial, IdentityAndDiagonal) {
  EXPECT_NEAR(hk::certify_sectorial(hk::identity(2)).constant, 1.0, 1e-14);
  const auto c = hk::certify_sectorial(diag({0.5, 8}));
  EXPECT_NEAR(c.constant, 1.0, 1e-14);
  EXPECT_EQ(c.radius, 0.0);
}

TEST(CertifySectorial, SimilarityMatchesBruteForce) {
  hk::InstanceSpec spec;
  spec.cls = hk::InstanceClass::SimilarityPerturbed;
  spec.seed = 11;
  const auto g = hk::gen_operator(spec, 3);
  const auto c = hk::certify_sectorial(g.matrix);
  const double ref = brute_force(g.matrix, false, 1e-3, 1e3, 100000);
  EXPECT_NEAR(c.constant, ref, 1e-6 * ref);
}

TEST(CertifySectorial, ScaleInvariant) {
  hk::InstanceSpec spec;
  spec.cls = hk::InstanceClass::SimilarityPerturbed;
  spec.seed = 12;
  const auto g = hk::gen_operator(spec, 3);
  const double l1 = hk::certify_sectorial(g.matrix).constant;
  const double l2 = hk::certify_sectorial(5.0 * g.matrix).constant;
  EXPECT_NEAR(l1, l2, 1e-6 * l1);
}

TEST(CertifyInvertible, DenserGridNeverDecreases) {
  CMatrix a = hk::identity(2);
  a(0, 1) = 3.0;
  const double coarse = hk::certify_invertible_sectorial(a, 1e8, 64).constant;
  const double fine = hk::certify_invertible_sectorial(a, 1e8, 2048).constant;
  EXPECT_GE(fine, coarse - 1e-12 * coarse);
}

TEST(BuildContour, OmegaK) {
  const auto cert = hk::certify_invertible_sectorial(hk::identity(2));
  const auto spec = hk::build_contour(cert, -0.5, 1e-10);
  const double r = std::pow(3.0 / (std::numbers::pi * 0.5 * 1e-10), 2.0);
  EXPECT_NEAR(spec.truncation_radius, r, 1e-8 * r);
  EXPECT_NEAR(spec.angle, std::numbers::pi / 6, 1e-15);
  EXPECT_NEAR(spec.radius, 0.5, 1e-15);
  EXPECT_GT(spec.truncation_radius, spec.radius);
}

TEST(BuildContour, SectorAndErrors) {
  const auto cert = hk::certify_sectorial(hk::identity(2));
  const auto spec = hk::build_contour(cert, 0.5, 1e-10);
  EXPECT_EQ(spec.region, hk::ContourRegion::SL);
  EXPECT_NEAR(spec.angle, std::numbers::pi / 6, 1e-15);
  EXPECT_EQ(spec.radius, 0.0);
  const auto inv = hk::certify_invertible_sectorial(hk::identity(2));
  EXPECT_THROW(hk::build_contour(inv, 0.5, 1e-10), hk::Error);
  EXPECT_THROW(hk::build_contour(inv, -1e-9, 1e-10), hk::Error);
}

TEST(RegionBound, IdentityAndDiagonal) {
  for (const CMatrix& a : {CMatrix(hk::identity(2)), diag({1, 2})}) {
    const auto cert = hk::certify_invertible_sectorial(a);
    const auto samples = hk::verify_region_bound(a, cert, 100);
    ASSERT_EQ(samples.size(), 100u);
    for (const auto& s : samples) {
      EXPECT_GT(s.margin, 0.0);
      // direct evaluation with the oracle norm
      const CMatrix r = (a + s.lambda * CMatrix::Identity(2, 2)).inverse();
      EXPECT_NEAR(s.witnessed, (1.0 + std::abs(s.lambda)) * oracle::norm2(r), 1e-10 * s.witnessed);
    }
  }
}

TEST(RegionBound, SingleSampleAtApex) {
  const auto cert = hk::certify_invertible_sectorial(hk::identity(2));
  const auto samples = hk::verify_region_bound(hk::identity(2), cert, 1);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_NEAR(std::abs(samples[0].lambda - Complex(-0.5, 0.0)), 0.0, 1e-15);
}

TEST(RegionBound, GeneratedOperators) {
  for (auto cls : {hk::InstanceClass::SimilarityPerturbed, hk::InstanceClass::JordanBlock}) {
    hk::InstanceSpec spec;
    spec.cls = cls;
    spec.seed = 21;
    const auto g = hk::gen_operator(spec, 5);
    const auto cert = hk::certify_invertible_sectorial(g.matrix);
    for (const auto& s : hk::verify_region_bound(g.matrix, cert, 100)) EXPECT_GE(s.margin, -1e-9);
  }
}
