#pragma once

// Bounded-imaginary-powers certificates (M, phi) with ||A^{it}|| <= M e^{phi |t|}.
//
// Analytic certificates hold for every real t:
//   A = S D S^{-1}, D > 0:   ||A^{it}|| = ||S D^{it} S^{-1}|| <= cond2(S)               -> (cond2(S), 0)
//   A = lambda I + N:        A^{it} = lambda^{it} sum_{k<n} binom(it, k) (N/lambda)^k with
//                            |binom(it, k)| <= binom(|t|+k-1, k) <= e^{|t| H_k}; so with
//                            x = ||N|| / lambda
//                              (sum_{k<n} x^k, H_{n-1})          always
//                              (1, -ln(1 - x))                   when x < 1 (binomial series)
// Fitted certificates only dominate the sampled range |t| <= t_max.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hk/cmatrix.hpp"
#include "hk/error.hpp"
#include "hk/gen.hpp"
#include "hk/powers.hpp"

namespace hk {

enum class BipProvenance { AnalyticNormal, AnalyticSimilarity, AnalyticJordan, Fitted };

inline std::string to_string(BipProvenance p) {
  switch (p) {
    case BipProvenance::AnalyticNormal: return "AnalyticNormal";
    case BipProvenance::AnalyticSimilarity: return "AnalyticSimilarity";
    case BipProvenance::AnalyticJordan: return "AnalyticJordan";
    case BipProvenance::Fitted: return "Fitted";
  }
  return "Unknown";
}

inline bool is_analytic(BipProvenance p) { return p != BipProvenance::Fitted; }

struct BipSample {
  double t;
  double norm;
};

struct BipCertificate {
  double M = 1.0;
  double phi = 0.0;
  BipProvenance provenance = BipProvenance::AnalyticNormal;
  double t_max = 0.0;  // sampled range; 0 for analytic certificates
  std::vector<BipSample> samples;

  double bound(double t) const { return M * std::exp(phi * std::abs(t)); }
};

/// ||A^{it}|| on the grid: oracle when A is diagonalizable, imaginary-power quadrature otherwise.
inline std::vector<BipSample> sample_imaginary_norms(const CMatrix& a, const std::vector<double>& t_grid,
                                                     const QuadratureConfig& cfg = {}) {
  require_square(a, "sample_imaginary_norms");
  std::optional<SpectralCalculus> calc;
  try {
    calc.emplace(a);
  } catch (const Error& e) {
    if (e.code() != Errc::NonDiagonalizable) throw;
  }
  std::vector<BipSample> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (t == 0.0) {
      out.push_back({0.0, 1.0});
      continue;
    }
    const CMatrix p = calc ? calc->power(Complex(0.0, t)) : imaginary_power(a, t, cfg).value;
    out.push_back({t, spectral_norm(p)});
  }
  return out;
}

/// Global certificate from generator structure; validated against `a`.
inline BipCertificate analytic_bip(const CMatrix& a, const OperatorStructure& st) {
  require_square(a, "analytic_bip");
  BipCertificate cert;
  const double scale = std::max(1.0, a.norm());
  if (st.cls == InstanceClass::JordanBlock) {
    const int n = static_cast<int>(a.rows());
    if (!(st.jordan_lambda > 0.0)) throw Error(Errc::StructureUnknown, "Jordan eigenvalue must be positive");
    CMatrix recon = st.jordan_lambda * identity(n);
    for (int i = 0; i + 1 < n; ++i) recon(i, i + 1) = 1.0;
    if ((recon - a).norm() > 1e-10 * scale)
      throw Error(Errc::StructureUnknown, "structure does not reproduce the matrix");
    const double x = st.nilpotent_norm / st.jordan_lambda;
    double m_sum = 0.0, harmonic = 0.0, xk = 1.0;
    for (int k = 0; k < n; ++k) {
      m_sum += xk;
      xk *= x;
      if (k >= 1) harmonic += 1.0 / k;
    }
    cert.M = std::max(1.0, m_sum);
    cert.phi = harmonic;
    if (x < 1.0 && -std::log1p(-x) <= harmonic) {
      cert.M = 1.0;
      cert.phi = -std::log1p(-x);
    }
    cert.provenance = BipProvenance::AnalyticJordan;
    return cert;
  }
  if (st.similarity.rows() != a.rows() || st.similarity.cols() != a.cols() ||
      st.diagonal.size() != a.rows())
    throw Error(Errc::StructureUnknown, "structure dimensions do not match the matrix");
  if (st.diagonal.minCoeff() <= 0.0) throw Error(Errc::StructureUnknown, "diagonal must be positive");
  const CMatrix recon = st.similarity * st.diagonal.cast<Complex>().asDiagonal() * inverse(st.similarity);
  if ((recon - a).norm() > 1e-8 * scale)
    throw Error(Errc::StructureUnknown, "structure does not reproduce the matrix");
  cert.M = std::max(1.0, condition_number(st.similarity));
  cert.phi = 0.0;
  cert.provenance = st.cls == InstanceClass::SimilarityPerturbed ? BipProvenance::AnalyticSimilarity
                                                                 : BipProvenance::AnalyticNormal;
  return cert;
}

/// For each phi: M(phi) = max(1, max_t norm e^{-phi|t|}); keeps the phi minimizing
/// M(phi) e^{phi t_ref}, t_ref = max |t|. Objective ties (relative 1e-9) go to the smaller M.
inline BipCertificate fit_bip(const std::vector<BipSample>& samples, const std::vector<double>& phi_grid) {
  if (samples.empty()) throw Error(Errc::EmptySamples, "no samples to fit");
  if (phi_grid.empty()) throw Error(Errc::InvalidArgument, "empty phi grid");
  const bool has_zero = std::any_of(samples.begin(), samples.end(), [](const BipSample& s) { return s.t == 0.0; });
  if (!has_zero) throw Error(Errc::InvalidArgument, "samples must include t = 0");
  double t_ref = 0.0;
  for (const auto& s : samples) t_ref = std::max(t_ref, std::abs(s.t));

  BipCertificate best;
  best.provenance = BipProvenance::Fitted;
  double best_obj = std::numeric_limits<double>::infinity();
  for (double phi : phi_grid) {
    if (phi < 0.0) continue;
    double m = 1.0;
    for (const auto& s : samples) m = std::max(m, s.norm * std::exp(-phi * std::abs(s.t)));
    const double obj = m * std::exp(phi * t_ref);
    const bool better = obj < best_obj * (1.0 - 1e-9);
    const bool tie = !better && obj <= best_obj * (1.0 + 1e-9) && m < best.M;
    if (better || tie) {
      best_obj = std::min(best_obj, obj);
      best.M = m;
      best.phi = phi;
    }
  }
  if (!std::isfinite(best_obj)) throw Error(Errc::InvalidArgument, "phi grid has no nonnegative entry");
  best.t_max = t_ref;
  best.samples = samples;
  return best;
}

}  // namespace hk
