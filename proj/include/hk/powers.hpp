#pragma once

// Complex powers of invertible sectorial matrices.
//
// Routes:
//   oracle_power             V diag(lambda^z) V^{-1}, principal branch
//   balakrishnan_neg_power   A^{-a} = sin(pi a)/pi * int_0^inf s^{-a} (A+s)^{-1} ds
//   pos_power                A^{a} = A * A^{a-1}
//   dunford_power            A^z = 1/(2 pi i) * int_{dOmega_K} (-l)^z (A+l)^{-1} dl,  Re z < 0
//   imaginary_power          A^{it} = sinh(pi t)/(pi t) * int_0^inf s^{it} (A+s)^{-2} A ds
//   extended_power_q         Q(eta, m, k) = 1/(2 pi i) * int_{dS_L} r_k(l)^m (-l)^eta (B+l)^{-1} dl,
//                            r_k(l) = k/(k-l) - 1/(1-kl)
//
// Real-line integrals use s = e^x. Every quadrature result carries an error estimate:
// the bound (or endpoint extrapolation) of the discarded tails plus the sum of embedded
// n/2-point rule differences over all panels.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>

#include "hk/cmatrix.hpp"
#include "hk/defaults.hpp"
#include "hk/error.hpp"
#include "hk/quadrature.hpp"
#include "hk/sectorial.hpp"

namespace hk {

enum class PowerMethod { Oracle, Balakrishnan, Dunford, ImaginaryIntegral, ExtendedCalculusQ };

inline std::string to_string(PowerMethod m) {
  switch (m) {
    case PowerMethod::Oracle: return "Oracle";
    case PowerMethod::Balakrishnan: return "Balakrishnan";
    case PowerMethod::Dunford: return "Dunford";
    case PowerMethod::ImaginaryIntegral: return "ImaginaryIntegral";
    case PowerMethod::ExtendedCalculusQ: return "ExtendedCalculusQ";
  }
  return "Unknown";
}

struct QuadratureConfig {
  int nodes_per_panel = defaults::kNodes;
  int panel_count = defaults::kPanels;
  double lower = defaults::kTruncLower;  // truncation bounds in x = ln s
  double upper = defaults::kTruncUpper;
  double tail_tol = defaults::kTailTol;
  double rel_tol = defaults::kPanelRelTol;
  int max_depth = 12;

  void validate() const {
    if (nodes_per_panel < 2) throw Error(Errc::InvalidArgument, "nodes per panel must be >= 2");
    if (panel_count < 1) throw Error(Errc::InvalidArgument, "panel count must be >= 1");
    if (!(lower < upper)) throw Error(Errc::InvalidArgument, "truncation bounds must be ordered");
    if (!(tail_tol > 0.0) || !(rel_tol > 0.0)) throw Error(Errc::InvalidArgument, "tolerances must be positive");
  }

  double panel_width() const { return (upper - lower) / panel_count; }

  PanelOptions panels(double max_width) const {
    PanelOptions p;
    p.nodes = nodes_per_panel;
    p.max_width = max_width;
    p.rel_tol = rel_tol;
    p.max_depth = max_depth;
    return p;
  }
};

struct PowerResult {
  CMatrix value;
  Complex exponent;
  PowerMethod method = PowerMethod::Oracle;
  double error_estimate = 0.0;  // absolute, in the Frobenius norm (bounds the spectral norm)
  std::size_t evaluations = 0;  // resolvent evaluations
  std::size_t panels = 0;
  double trunc_lo = 0.0;        // integration range actually used (x = ln s, or ln |l| on rays)
  double trunc_hi = 0.0;
  double tail_bound = 0.0;
};

// ---------------------------------------------------------------------------
// oracle

/// Eigendecomposition-based functional calculus, reusable across many exponents.
class SpectralCalculus {
 public:
  explicit SpectralCalculus(const CMatrix& a, double cond_max = defaults::kCondMax)
      : eig_(eig(a, cond_max)), vinv_(inverse(eig_.vectors)), log_(eig_.eigenvalues.size()) {
    for (Eigen::Index i = 0; i < eig_.eigenvalues.size(); ++i) {
      const Complex l = eig_.eigenvalues(i);
      const double scale = std::max(1.0, std::abs(l));
      if (l.real() <= 1e-12 * scale && std::abs(l.imag()) <= 1e-12 * scale)
        throw Error(Errc::SpectrumOnCut, "eigenvalue on (-inf, 0]");
      log_(i) = std::log(l);
    }
    const double n = static_cast<double>(eig_.eigenvalues.size());
    rel_error_ = eig_.condition * (eig_.residual + 16.0 * n * kEps);
    if (!(rel_error_ <= kMaxRelError))
      throw Error(Errc::NonDiagonalizable, "eigendecomposition too ill-conditioned for the oracle");
  }

  /// Decompositions whose a-posteriori relative error exceeds this are rejected.
  static constexpr double kMaxRelError = 1e-6;

  CMatrix power(Complex z) const {
    if (z == Complex(0.0, 0.0)) return identity(eig_.vectors.rows());
    return eig_.vectors * (z * log_).array().exp().matrix().asDiagonal() * vinv_;
  }

  CVector apply(Complex z, const CVector& x) const {
    if (z == Complex(0.0, 0.0)) return x;
    CVector c = vinv_ * x;
    c.array() *= (z * log_).array().exp();
    return eig_.vectors * c;
  }

  /// Relative error scale of power(z): cond(V) times the eigen-residual.
  double relative_error() const { return rel_error_; }
  const EigDecomposition& decomposition() const { return eig_; }

 private:
  EigDecomposition eig_;
  CMatrix vinv_;
  CVector log_;
  double rel_error_ = 0.0;
};

inline PowerResult oracle_power(const CMatrix& a, Complex z, double cond_max = defaults::kCondMax) {
  require_square(a, "oracle_power");
  PowerResult out;
  out.exponent = z;
  out.method = PowerMethod::Oracle;
  if (z == Complex(0.0, 0.0)) {
    out.value = identity(a.rows());
    return out;
  }
  const SpectralCalculus calc(a, cond_max);
  out.value = calc.power(z);
  out.error_estimate = calc.relative_error() * std::max(out.value.norm(), kEps);
  return out;
}

// ---------------------------------------------------------------------------
// helpers

namespace detail {

/// (c A + shift I)^{-1}; a singular shifted matrix is reported at s = shift / c.
inline LuFactor shifted_lu(const CMatrix& a, double c, Complex shift) {
  CMatrix m = c * a;
  m.diagonal().array() += shift;
  try {
    return LuFactor(m);
  } catch (const Error&) {
    throw ResolventSingularError(c != 0.0 ? shift.real() / c : shift.real());
  }
}

/// Moves the truncation ends outward in steps of `step` until the endpoint-extrapolated
/// tails (|F(end)| / decay rate) fall below tol / 2 each. Returns the tail estimate.
template <class NormAt>
double extend_truncation(NormAt&& norm_at, double& lo, double& hi, double step, double rate_lo,
                         double rate_hi, double prefactor, double tol) {
  constexpr double kLimit = 5000.0;
  double tail_lo = prefactor * norm_at(lo) / rate_lo;
  while (tail_lo > 0.5 * tol) {
    lo -= step;
    if (lo < -kLimit) throw Error(Errc::QuadratureFailed, "lower tail does not decay to tolerance");
    tail_lo = prefactor * norm_at(lo) / rate_lo;
  }
  double tail_hi = prefactor * norm_at(hi) / rate_hi;
  while (tail_hi > 0.5 * tol) {
    hi += step;
    if (hi > kLimit) throw Error(Errc::QuadratureFailed, "upper tail does not decay to tolerance");
    tail_hi = prefactor * norm_at(hi) / rate_hi;
  }
  return tail_lo + tail_hi;
}

inline Complex principal_pow(Complex base, Complex z) { return std::exp(z * std::log(base)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Balakrishnan

/// A^{-alpha} for alpha in (0, 1). With s = e^x the integrand is
///   e^{(1-alpha) x} (A + e^x)^{-1} = e^{-alpha x} (I + e^{-x} A)^{-1},
/// evaluated in the second form for x > 0 so that large x never overflows.
inline PowerResult balakrishnan_neg_power(const CMatrix& a, double alpha, const QuadratureConfig& cfg = {}) {
  require_square(a, "balakrishnan_neg_power");
  cfg.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::AlphaOutOfRange, "alpha must lie in (0, 1)");
  const auto integrand = [&](double x) -> CMatrix {
    if (x <= 0.0) return std::exp((1.0 - alpha) * x) * detail::shifted_lu(a, 1.0, std::exp(x)).inverse();
    const double e = std::exp(-x);
    try {
      return std::exp(-alpha * x) * detail::shifted_lu(a, e, 1.0).inverse();
    } catch (const ResolventSingularError&) {
      throw ResolventSingularError(std::exp(x));
    }
  };
  const double pref = std::sin(std::numbers::pi * alpha) / std::numbers::pi;

  double lo = cfg.lower, hi = cfg.upper;
  const double width = cfg.panel_width();
  const double tail = detail::extend_truncation([&](double x) { return integrand(x).norm(); }, lo, hi, width,
                                                1.0 - alpha, alpha, pref, cfg.tail_tol);
  const auto q = integrate_panels(integrand, lo, hi, cfg.panels(width));

  PowerResult out;
  out.value = pref * q.value;
  out.exponent = Complex(-alpha, 0.0);
  out.method = PowerMethod::Balakrishnan;
  out.tail_bound = tail;
  out.error_estimate = tail + pref * q.error;
  out.evaluations = q.evaluations;
  out.panels = q.panels;
  out.trunc_lo = lo;
  out.trunc_hi = hi;
  return out;
}

/// A^{alpha} = A * A^{alpha - 1}, alpha in (0, 1).
inline PowerResult pos_power(const CMatrix& a, double alpha, const QuadratureConfig& cfg = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::AlphaOutOfRange, "alpha must lie in (0, 1)");
  PowerResult neg = balakrishnan_neg_power(a, 1.0 - alpha, cfg);
  PowerResult out = neg;
  out.value = matmul(a, neg.value);
  out.exponent = Complex(alpha, 0.0);
  out.error_estimate = spectral_norm(a) * neg.error_estimate + 16.0 * kEps * out.value.norm();
  return out;
}

// ---------------------------------------------------------------------------
// Dunford

/// A^z for Re z < 0 over the boundary of Omega_K, traversed as
///   ray at arg -theta from R in to r,  arc r e^{i phi} for phi from -theta down to theta - 2 pi,
///   ray at arg +theta from r out to R.
inline PowerResult dunford_power(const CMatrix& a, Complex z, const SectorialCertificate& cert,
                                 const QuadratureConfig& cfg = {}) {
  require_square(a, "dunford_power");
  cfg.validate();
  if (!(z.real() < 0.0)) throw Error(Errc::ExponentNotNegative, "Dunford route needs Re z < 0");
  if (cert.kind != SectorialKind::InvertibleSectorial)
    throw Error(Errc::InvalidArgument, "Dunford route needs an invertible sectorial certificate");
  const ContourSpec contour = build_contour(cert, z.real(), cfg.tail_tol, z.imag(), cfg.nodes_per_panel);
  const double theta = contour.angle, r = contour.radius, R = contour.truncation_radius;

  const auto kernel = [&](Complex lambda) -> CMatrix {
    const Complex w = detail::principal_pow(-lambda, z);
    CMatrix m = a;
    m.diagonal().array() += lambda;
    LuFactor lu = [&] {
      try {
        return LuFactor(m);
      } catch (const Error&) {
        throw ResolventSingularError(std::abs(lambda));
      }
    }();
    return w * lu.inverse();
  };

  const double ray_width = std::min(cfg.panel_width(), 2.0);
  const PanelOptions ray_opt = cfg.panels(ray_width);
  const PanelOptions arc_opt = cfg.panels(0.5);
  const Complex e_minus = std::polar(1.0, -theta), e_plus = std::polar(1.0, theta);

  const auto in_ray = integrate_panels(
      [&](double x) -> CMatrix {
        const Complex l = std::exp(x) * e_minus;
        return kernel(l) * l;
      },
      std::log(r), std::log(R), ray_opt);
  const auto arc = integrate_panels(
      [&](double phi) -> CMatrix {
        const Complex l = std::polar(r, phi);
        return kernel(l) * (Complex(0.0, 1.0) * l);
      },
      theta - 2.0 * std::numbers::pi, -theta, arc_opt);
  const auto out_ray = integrate_panels(
      [&](double x) -> CMatrix {
        const Complex l = std::exp(x) * e_plus;
        return kernel(l) * l;
      },
      std::log(r), std::log(R), ray_opt);

  // The in-ray and the arc are traversed against increasing parameter.
  const Complex scale = 1.0 / (2.0 * std::numbers::pi * Complex(0.0, 1.0));
  PowerResult out;
  out.value = scale * (out_ray.value - in_ray.value - arc.value);
  out.exponent = z;
  out.method = PowerMethod::Dunford;
  out.tail_bound = dunford_tail_bound(cert.constant, z.real(), z.imag(), R);
  out.error_estimate = out.tail_bound + (in_ray.error + arc.error + out_ray.error) / (2.0 * std::numbers::pi);
  out.evaluations = in_ray.evaluations + arc.evaluations + out_ray.evaluations;
  out.panels = in_ray.panels + arc.panels + out_ray.panels;
  out.trunc_lo = std::log(r);
  out.trunc_hi = std::log(R);
  return out;
}

// ---------------------------------------------------------------------------
// imaginary powers

/// A^{it}. With s = e^x the integrand is e^{itx} e^x (A + e^x)^{-2} A; panels are at most
/// pi / (4|t|) wide so that each holds at most an eighth of an oscillation period.
inline PowerResult imaginary_power(const CMatrix& a, double t, const QuadratureConfig& cfg = {}) {
  require_square(a, "imaginary_power");
  cfg.validate();
  PowerResult out;
  out.exponent = Complex(0.0, t);
  out.method = PowerMethod::ImaginaryIntegral;
  if (t == 0.0) {
    out.value = identity(a.rows());
    return out;
  }
  // e^x (A + e^x)^{-2} A; for x > 0 as e^{-x} (I + e^{-x} A)^{-2} A
  const auto envelope = [&](double x) -> CMatrix {
    if (x <= 0.0) {
      const double s = std::exp(x);
      const LuFactor lu = detail::shifted_lu(a, 1.0, s);
      return s * lu.solve(lu.solve(a));
    }
    const double e = std::exp(-x);
    try {
      const LuFactor lu = detail::shifted_lu(a, e, 1.0);
      return e * lu.solve(lu.solve(a));
    } catch (const ResolventSingularError&) {
      throw ResolventSingularError(std::exp(x));
    }
  };
  const auto integrand = [&](double x) -> CMatrix { return std::polar(1.0, t * x) * envelope(x); };
  const double pref = std::sinh(std::numbers::pi * t) / (std::numbers::pi * t);

  double lo = cfg.lower, hi = cfg.upper;
  const double width = std::min(cfg.panel_width(), std::numbers::pi / (4.0 * std::abs(t)));
  const double tail = detail::extend_truncation([&](double x) { return envelope(x).norm(); }, lo, hi,
                                                cfg.panel_width(), 1.0, 1.0, std::abs(pref), cfg.tail_tol);
  const auto q = integrate_panels(integrand, lo, hi, cfg.panels(width));

  out.value = pref * q.value;
  out.tail_bound = tail;
  out.error_estimate = tail + std::abs(pref) * q.error;
  out.evaluations = q.evaluations;
  out.panels = q.panels;
  out.trunc_lo = lo;
  out.trunc_hi = hi;
  return out;
}

// ---------------------------------------------------------------------------
// extended calculus approximants

/// k/(k-l) - 1/(1-kl), written without the cancellation near l = 0.
inline Complex regularizer(Complex lambda, double k) {
  return lambda * (1.0 - k * k) / ((k - lambda) * (1.0 - k * lambda));
}

/// Q(eta, m, k) over the two rays of S_L (in along arg -theta, out along arg +theta).
/// In x = ln|l| the integrand decays like e^{(m + Re eta) x} at the origin and like
/// e^{-(m - Re eta) x} at infinity; truncation is extended until both tails are below
/// the tolerance. Panels start no wider than theta, the angular distance from the rays
/// to the regularizer poles at l = k and l = 1/k.
inline PowerResult extended_power_q(const CMatrix& b, Complex eta, int m, double k,
                                    const SectorialCertificate& cert, const QuadratureConfig& cfg = {}) {
  require_square(b, "extended_power_q");
  cfg.validate();
  if (m < 1 || !(std::abs(eta.real()) < m))
    throw Error(Errc::RegularizerOrderTooLow, "need |Re eta| < m");
  if (!(k > 0.0)) throw Error(Errc::InvalidArgument, "k must be positive");
  if (cert.kind != SectorialKind::Sectorial)
    throw Error(Errc::InvalidArgument, "extended calculus needs a sectorial certificate");

  const double theta = std::asin(1.0 / (2.0 * cert.constant));
  const Complex e_minus = std::polar(1.0, -theta), e_plus = std::polar(1.0, theta);

  const auto kernel = [&](Complex lambda) -> CMatrix {
    const Complex w = std::pow(regularizer(lambda, k), m) * detail::principal_pow(-lambda, eta);
    CMatrix mat = b;
    mat.diagonal().array() += lambda;
    LuFactor lu = [&] {
      try {
        return LuFactor(mat);
      } catch (const Error&) {
        throw ResolventSingularError(std::abs(lambda));
      }
    }();
    return w * lu.inverse();
  };
  const auto ray = [&](Complex dir) {
    return [&, dir](double x) -> CMatrix {
      const Complex l = std::exp(x) * dir;
      return kernel(l) * l;
    };
  };
  const auto in_ray = ray(e_minus);
  const auto out_ray = ray(e_plus);

  const double lk = std::abs(std::log(k));
  double lo = -lk - 10.0, hi = lk + 10.0;
  const double step = cfg.panel_width();
  const double tail = detail::extend_truncation(
      [&](double x) { return in_ray(x).norm() + out_ray(x).norm(); }, lo, hi, step, m + eta.real(),
      m - eta.real(), 1.0 / (2.0 * std::numbers::pi), cfg.tail_tol);

  const PanelOptions opt = cfg.panels(std::min(step, theta));
  const auto qi = integrate_panels(in_ray, lo, hi, opt);
  const auto qo = integrate_panels(out_ray, lo, hi, opt);

  const Complex scale = 1.0 / (2.0 * std::numbers::pi * Complex(0.0, 1.0));
  PowerResult out;
  out.value = scale * (qo.value - qi.value);
  out.exponent = eta;
  out.method = PowerMethod::ExtendedCalculusQ;
  out.tail_bound = tail;
  out.error_estimate = tail + (qi.error + qo.error) / (2.0 * std::numbers::pi);
  out.evaluations = qi.evaluations + qo.evaluations;
  out.panels = qi.panels + qo.panels;
  out.trunc_lo = lo;
  out.trunc_hi = hi;
  return out;
}

// ---------------------------------------------------------------------------
// general exponent by quadrature

namespace detail {

inline CMatrix integer_power(const CMatrix& a, long p) {
  CMatrix base = p < 0 ? inverse(a) : a;
  unsigned long e = static_cast<unsigned long>(p < 0 ? -p : p);
  CMatrix acc = identity(a.rows());
  while (e) {
    if (e & 1UL) acc = acc * base;
    base = base * base;
    e >>= 1UL;
  }
  return acc;
}

}  // namespace detail

/// A^z for any z by the quadrature routes only: integer real exponents directly,
/// real exponents in (-1, 0) and (0, 1) by Balakrishnan, imaginary exponents by the
/// imaginary-power integral, Re z < 0 by Dunford, and Re z > 0 as A^n A^{z-n} with
/// n = floor(Re z) + 1.
inline PowerResult quadrature_power(const CMatrix& a, Complex z, const QuadratureConfig& cfg = {},
                                    std::optional<SectorialCertificate> cert = std::nullopt) {
  require_square(a, "quadrature_power");
  const double re = z.real(), im = z.imag();
  if (im == 0.0 && re == std::floor(re) && std::abs(re) < 64.0) {
    PowerResult out;
    out.value = detail::integer_power(a, static_cast<long>(re));
    out.exponent = z;
    out.method = PowerMethod::Oracle;
    out.error_estimate = 16.0 * std::max(1.0, std::abs(re)) * kEps * out.value.norm() *
                         (re < 0 ? condition_number(a) : 1.0);
    return out;
  }
  if (im == 0.0 && re > -1.0 && re < 0.0) return balakrishnan_neg_power(a, -re, cfg);
  if (im == 0.0 && re > 0.0 && re < 1.0) return pos_power(a, re, cfg);
  if (re == 0.0) return imaginary_power(a, im, cfg);
  if (!cert) cert = certify_invertible_sectorial(a);
  if (re < 0.0) return dunford_power(a, z, *cert, cfg);
  const long shift = static_cast<long>(std::floor(re)) + 1;
  PowerResult part = dunford_power(a, z - static_cast<double>(shift), *cert, cfg);
  const CMatrix an = detail::integer_power(a, shift);
  PowerResult out = part;
  out.value = an * part.value;
  out.exponent = z;
  out.error_estimate = spectral_norm(an) * part.error_estimate;
  return out;
}

/// Oracle when the matrix is diagonalizable with the spectrum off the cut, quadrature otherwise.
inline PowerResult auto_power(const CMatrix& a, Complex z, const QuadratureConfig& cfg = {}) {
  try {
    return oracle_power(a, z);
  } catch (const Error& e) {
    if (e.code() != Errc::NonDiagonalizable) throw;
  }
  return quadrature_power(a, z, cfg);
}

}  // namespace hk
