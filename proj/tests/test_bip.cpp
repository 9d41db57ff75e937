#include <cmath>

#include <gtest/gtest.h>

#include "hk/bip.hpp"
#include "hk/defaults.hpp"
#include "hk/gen.hpp"
#include "oracles.hpp"

using hk::CMatrix;

namespace {

hk::GeneratedOperator make(hk::InstanceClass cls, std::uint64_t seed, int n) {
  hk::InstanceSpec spec;
  spec.cls = cls;
  spec.seed = seed;
  return hk::gen_operator(spec, n);
}

}  // namespace

TEST(SampleImaginaryNorms, DiagonalIsUnitary) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  for (const auto& s : hk::sample_imaginary_norms(a, hk::defaults::bip_t_grid())) EXPECT_NEAR(s.norm, 1.0, 1e-12);
  const auto single = hk::sample_imaginary_norms(a, {0.0});
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].norm, 1.0);
}

TEST(SampleImaginaryNorms, SimilarityBoundedByCondition) {
  const auto g = make(hk::InstanceClass::SimilarityPerturbed, 1, 4);
  const double cond = oracle::norm2(g.structure.similarity) * oracle::norm2(g.structure.similarity.inverse());
  for (const auto& s : hk::sample_imaginary_norms(g.matrix, hk::defaults::bip_t_grid()))
    EXPECT_LE(s.norm, cond * (1.0 + 1e-9));
}

TEST(SampleImaginaryNorms, JordanUsesQuadrature) {
  const auto g = make(hk::InstanceClass::JordanBlock, 2, 3);
  const auto samples = hk::sample_imaginary_norms(g.matrix, {-1.0, 0.0, 2.0});
  for (const auto& s : samples) {
    const CMatrix ref = oracle::jordan_power(g.structure.jordan_lambda, 3, hk::Complex(0.0, s.t));
    EXPECT_NEAR(s.norm, oracle::norm2(ref), 1e-6);
  }
}

TEST(AnalyticBip, Cases) {
  const auto d = make(hk::InstanceClass::HermitianDiag, 3, 2);
  const auto c1 = hk::analytic_bip(d.matrix, d.structure);
  EXPECT_EQ(c1.M, 1.0);
  EXPECT_EQ(c1.phi, 0.0);
  const auto n = make(hk::InstanceClass::NormalSector, 3, 4);
  const auto c2 = hk::analytic_bip(n.matrix, n.structure);
  EXPECT_NEAR(c2.M, 1.0, 1e-12);
  EXPECT_EQ(c2.provenance, hk::BipProvenance::AnalyticNormal);
  const auto s = make(hk::InstanceClass::SimilarityPerturbed, 3, 4);
  const auto c3 = hk::analytic_bip(s.matrix, s.structure);
  EXPECT_NEAR(c3.M, 10.0, 0.5);
  EXPECT_EQ(c3.provenance, hk::BipProvenance::AnalyticSimilarity);
}

TEST(AnalyticBip, DominatesSamples) {
  for (auto cls : {hk::InstanceClass::SimilarityPerturbed, hk::InstanceClass::JordanBlock,
                   hk::InstanceClass::NormalSector}) {
    for (int n : {2, 4}) {
      const auto g = make(cls, 7, n);
      const auto cert = hk::analytic_bip(g.matrix, g.structure);
      for (const auto& s : hk::sample_imaginary_norms(g.matrix, hk::defaults::bip_t_grid()))
        EXPECT_GE(cert.bound(s.t) - s.norm, -1e-9) << hk::to_string(cls) << " t=" << s.t;
    }
  }
}

TEST(AnalyticBip, StructureMismatch) {
  const auto g = make(hk::InstanceClass::SimilarityPerturbed, 4, 3);
  const auto other = make(hk::InstanceClass::SimilarityPerturbed, 5, 3);
  try {
    hk::analytic_bip(g.matrix, other.structure);
    FAIL();
  } catch (const hk::Error& e) {
    EXPECT_EQ(e.code(), hk::Errc::StructureUnknown);
  }
}

TEST(FitBip, Trivial) {
  std::vector<hk::BipSample> ones;
  for (double t : hk::defaults::bip_t_grid()) ones.push_back({t, 1.0});
  auto c = hk::fit_bip(ones, hk::defaults::bip_phi_grid());
  EXPECT_EQ(c.M, 1.0);
  EXPECT_EQ(c.phi, 0.0);
  EXPECT_EQ(c.provenance, hk::BipProvenance::Fitted);
  c = hk::fit_bip({{0.0, 1.0}}, hk::defaults::bip_phi_grid());
  EXPECT_EQ(c.M, 1.0);
  EXPECT_EQ(c.phi, 0.0);
}

TEST(FitBip, ExponentialData) {
  std::vector<hk::BipSample> samples;
  for (double t : hk::defaults::bip_t_grid()) samples.push_back({t, std::exp(0.5 * std::abs(t))});
  const auto c = hk::fit_bip(samples, hk::defaults::bip_phi_grid());
  EXPECT_NEAR(c.phi, 0.5, 0.02);
  EXPECT_NEAR(c.M, 1.0, 1e-9);
  for (const auto& s : samples) EXPECT_GE(c.bound(s.t) - s.norm, -1e-9);
}

TEST(FitBip, DominatesAndConvergesOnDiagonal) {
  const auto g = make(hk::InstanceClass::HermitianDiag, 8, 5);
  const auto c = hk::fit_bip(hk::sample_imaginary_norms(g.matrix, hk::defaults::bip_t_grid()),
                             hk::defaults::bip_phi_grid());
  EXPECT_LE(c.M, 1.0 + 1e-6);
  EXPECT_LE(c.phi, 1e-6);
  const auto j = make(hk::InstanceClass::JordanBlock, 8, 3);
  const auto samples = hk::sample_imaginary_norms(j.matrix, hk::defaults::bip_t_grid());
  const auto cj = hk::fit_bip(samples, hk::defaults::bip_phi_grid());
  for (const auto& s : samples) EXPECT_GE(cj.bound(s.t) - s.norm, -1e-9);
  EXPECT_EQ(cj.t_max, 10.0);
}

TEST(FitBip, Errors) {
  EXPECT_THROW(hk::fit_bip({}, hk::defaults::bip_phi_grid()), hk::Error);
  try {
    hk::fit_bip({}, {0.0});
  } catch (const hk::Error& e) {
    EXPECT_EQ(e.code(), hk::Errc::EmptySamples);
  }
  EXPECT_THROW(hk::fit_bip({{1.0, 1.0}}, {0.0}), hk::Error);
}
