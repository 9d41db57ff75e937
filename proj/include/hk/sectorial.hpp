#pragma once

// Sectoriality certificates by resolvent scanning, the regions Omega_K / S_L,
// their positively oriented boundaries, and sampled verification of the
// resolvent bounds that hold on those regions.
//
//   invertible sectorial:  (1 + s) ||(A + s)^{-1}|| <= K,  s in [0, inf)
//   sectorial:                   s ||(B + s)^{-1}|| <= L,  s in (0, inf)
//
// Omega_K = {|arg l| <= asin(1/2K)} u {|l| <= 1/2K},  (1 + |l|) ||(A + l)^{-1}|| <= 2K + 1
// S_L     = {|arg l| <= asin(1/2L)},                        |l| ||(B + l)^{-1}|| <= 2L - 1

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hk/cmatrix.hpp"
#include "hk/defaults.hpp"
#include "hk/error.hpp"

namespace hk {

enum class SectorialKind { InvertibleSectorial, Sectorial };

inline std::string to_string(SectorialKind k) {
  return k == SectorialKind::InvertibleSectorial ? "InvertibleSectorial" : "Sectorial";
}

struct ScanPoint {
  double s;
  double value;
};

struct SectorialCertificate {
  SectorialKind kind = SectorialKind::InvertibleSectorial;
  double constant = 1.0;  // K or L
  double angle = std::numbers::pi / 6.0;
  double radius = 0.5;
  std::vector<ScanPoint> scan;
  bool refined = false;
};

enum class ContourRegion { OmegaK, SL };

inline std::string to_string(ContourRegion r) { return r == ContourRegion::OmegaK ? "OmegaK" : "SL"; }

struct ContourSpec {
  ContourRegion region = ContourRegion::OmegaK;
  double angle = 0.0;
  double radius = 0.0;
  double truncation_radius = 1.0;
  int nodes_per_segment = defaults::kNodes;
};

namespace detail {

/// ||(A + shift)^{-1}|| as 1 / sigma_min(A + shift I).
inline double resolvent_norm(const CMatrix& a, Complex shift) {
  CMatrix m = a;
  m.diagonal().array() += shift;
  const Eigen::VectorXd sv = singular_values(m);
  const double smax = sv(0), smin = sv(sv.size() - 1);
  if (!(smin > static_cast<double>(a.rows()) * kEps * smax)) throw ResolventSingularError(shift.real());
  return 1.0 / smin;
}

inline double weight(SectorialKind kind, double s) {
  return kind == SectorialKind::InvertibleSectorial ? 1.0 + s : s;
}

inline double scan_value(const CMatrix& a, SectorialKind kind, double s) {
  return weight(kind, s) * resolvent_norm(a, Complex(s, 0.0));
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  if (n <= 0) return g;
  if (n == 1) return {hi};
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g.push_back(std::exp(a + (b - a) * i / (n - 1)));
  return g;
}

/// Golden-section maximization of g on [lo, hi]; returns the best point seen.
template <class G>
std::pair<double, double> golden_max(G&& g, double lo, double hi, int iters) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  std::pair<double, double> best = gc >= gd ? std::pair{c, gc} : std::pair{d, gd};
  for (int i = 0; i < iters && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
      if (gc > best.second) best = {c, gc};
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
      if (gd > best.second) best = {d, gd};
    }
  }
  return best;
}

inline SectorialCertificate certify(const CMatrix& a, SectorialKind kind, double s_min, double s_max,
                                    int n_grid, int golden_iterations) {
  require_square(a, "certify");
  if (!(s_min > 0.0) || !(s_max >= s_min) || n_grid < 1)
    throw Error(Errc::InvalidArgument, "certify: need 0 < s_min <= s_max and n_grid >= 1");

  std::vector<double> grid;
  if (kind == SectorialKind::InvertibleSectorial) grid.push_back(0.0);
  for (double s : log_grid(s_min, s_max, n_grid)) grid.push_back(s);

  SectorialCertificate cert;
  cert.kind = kind;
  for (double s : grid) cert.scan.push_back({s, scan_value(a, kind, s)});

  // Refine around the largest local maxima of the grid.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < cert.scan.size(); ++i) {
    const double v = cert.scan[i].value;
    const bool left_ok = i == 0 || cert.scan[i - 1].value <= v;
    const bool right_ok = i + 1 == cert.scan.size() || cert.scan[i + 1].value <= v;
    if (left_ok && right_ok) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t x, std::size_t y) {
    return cert.scan[x].value > cert.scan[y].value;
  });
  if (peaks.size() > 3) peaks.resize(3);

  std::vector<ScanPoint> refined;
  for (std::size_t i : peaks) {
    if (cert.scan.size() < 2) break;
    const double lo = cert.scan[i == 0 ? 0 : i - 1].s;
    const double hi = cert.scan[i + 1 == cert.scan.size() ? i : i + 1].s;
    if (!(hi > lo)) continue;
    std::pair<double, double> best;
    if (lo == 0.0) {
      best = golden_max([&](double s) { return scan_value(a, kind, s); }, lo, hi, golden_iterations);
    } else {
      best = golden_max([&](double x) { return scan_value(a, kind, std::exp(x)); }, std::log(lo),
                        std::log(hi), golden_iterations);
      best.first = std::exp(best.first);
    }
    refined.push_back({best.first, best.second});
  }
  for (const auto& p : refined) cert.scan.push_back(p);
  cert.refined = !refined.empty();

  double sup = 1.0;
  for (const auto& p : cert.scan) sup = std::max(sup, p.value);
  cert.constant = sup;
  cert.angle = std::asin(1.0 / (2.0 * sup));
  cert.radius = kind == SectorialKind::InvertibleSectorial ? 1.0 / (2.0 * sup) : 0.0;
  return cert;
}

}  // namespace detail

/// K = max(1, sup of (1+s)||(A+s)^{-1}||) over s = 0 and a log grid on [1e-8, s_max],
/// refined by golden-section search around the grid maxima.
inline SectorialCertificate certify_invertible_sectorial(const CMatrix& a,
                                                         double s_max = defaults::kScanSMax,
                                                         int n_grid = defaults::kScanPoints) {
  return detail::certify(a, SectorialKind::InvertibleSectorial, defaults::kScanSMin, s_max, n_grid,
                         defaults::kGoldenIterations);
}

/// L = max(1, sup of s||(B+s)^{-1}||) over a log grid on [s_min, s_max], refined.
inline SectorialCertificate certify_sectorial(const CMatrix& b, double s_min = defaults::kScanSMin,
                                              double s_max = defaults::kScanSMax,
                                              int n_grid = defaults::kScanPoints) {
  return detail::certify(b, SectorialKind::Sectorial, s_min, s_max, n_grid, defaults::kGoldenIterations);
}

/// Contour for a power with real part `re_z`. For Omega_K the truncation radius R solves
/// (2K+1) e^{pi |im_z|} R^{re_z} / (pi |re_z|) = tol_tail, the bound on the two discarded ray
/// tails. For S_L the rays meet at the origin; R is only a starting radius there, since the
/// regularized integrands are truncated adaptively.
inline ContourSpec build_contour(const SectorialCertificate& cert, double re_z, double tol_tail,
                                 double im_z = 0.0, int nodes_per_segment = defaults::kNodes) {
  if (!(tol_tail > 0.0)) throw Error(Errc::InvalidArgument, "tail tolerance must be positive");
  if (nodes_per_segment < 2) throw Error(Errc::InvalidArgument, "nodes per segment must be >= 2");
  ContourSpec c;
  c.angle = std::asin(1.0 / (2.0 * cert.constant));
  c.nodes_per_segment = nodes_per_segment;
  if (cert.kind == SectorialKind::Sectorial) {
    c.region = ContourRegion::SL;
    c.radius = 0.0;
    c.truncation_radius = 1.0 / tol_tail;
    return c;
  }
  c.region = ContourRegion::OmegaK;
  c.radius = 1.0 / (2.0 * cert.constant);
  if (!(re_z < 0.0)) throw Error(Errc::InvalidExponent, "Omega_K contour needs Re z < 0");
  const double k = cert.constant;
  const double log_r = (std::log(2.0 * k + 1.0) + std::numbers::pi * std::abs(im_z) -
                        std::log(std::numbers::pi * std::abs(re_z) * tol_tail)) /
                       std::abs(re_z);
  if (!std::isfinite(log_r) || log_r > 700.0)
    throw Error(Errc::InvalidExponent, "tail tolerance unreachable for Re z = " + std::to_string(re_z));
  c.truncation_radius = std::max(std::exp(log_r), 2.0 * c.radius);
  return c;
}

/// Analytic bound on the discarded Omega_K ray tails beyond radius R.
inline double dunford_tail_bound(double k, double re_z, double im_z, double radius_r) {
  return (2.0 * k + 1.0) * std::exp(std::numbers::pi * std::abs(im_z)) * std::pow(radius_r, re_z) /
         (std::numbers::pi * std::abs(re_z));
}

struct RegionSample {
  Complex lambda;
  double witnessed;
  double bound;
  double margin;  // bound - witnessed
};

/// Samples the boundary of Omega_K (or S_L) and reports the margin of the resolvent bound
/// 2K+1 (or 2L-1). The boundary is parameterized symmetrically about the arc apex
/// lambda = -radius: the middle half of the parameter range covers the arc, the outer
/// quarters the two rays on a logarithmic radius scale up to `rho_max`. One sample lands on
/// the apex.
inline std::vector<RegionSample> verify_region_bound(const CMatrix& a, const SectorialCertificate& cert,
                                                     int n_samples, double rho_max = 0.0) {
  require_square(a, "verify_region_bound");
  std::vector<RegionSample> out;
  if (n_samples <= 0) return out;
  const bool invertible = cert.kind == SectorialKind::InvertibleSectorial;
  const double theta = std::asin(1.0 / (2.0 * cert.constant));
  const double bound = invertible ? 2.0 * cert.constant + 1.0 : 2.0 * cert.constant - 1.0;
  const double r = invertible ? 1.0 / (2.0 * cert.constant) : 1e-6;
  if (rho_max <= 0.0) rho_max = 1e4 * std::max(1.0, spectral_norm(a));

  for (int j = 0; j < n_samples; ++j) {
    const double u = -1.0 + (2.0 * j + 1.0) / n_samples;
    Complex lambda;
    const double au = std::abs(u);
    const double sgn = u < 0 ? -1.0 : 1.0;
    if (invertible && au <= 0.5) {
      // arc from arg = pi (apex) to arg = +-theta
      const double phi = std::numbers::pi - (std::numbers::pi - theta) * (au / 0.5);
      lambda = std::polar(r, sgn * phi);
    } else {
      const double frac = invertible ? (au - 0.5) / 0.5 : au;
      const double rho = r * std::pow(rho_max / r, frac);
      lambda = std::polar(rho, sgn * theta);
    }
    const double w = invertible ? 1.0 + std::abs(lambda) : std::abs(lambda);
    const double witnessed = w * detail::resolvent_norm(a, lambda);
    out.push_back({lambda, witnessed, bound, bound - witnessed});
  }
  return out;
}

}  // namespace hk
