#pragma once

// Gauss-Legendre rules and an adaptive composite integrator for matrix-valued
// integrands. Each panel is integrated with an n-point rule and an embedded
// n/2-point rule; the difference is the panel's error indicator, and panels
// whose indicator exceeds their share of the tolerance are bisected. Panel
// order (and hence summation order) is fixed by position, so results do not
// depend on evaluation scheduling.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <type_traits>
#include <vector>

#include "hk/cmatrix.hpp"
#include "hk/error.hpp"

namespace hk {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on the three-term recurrence.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "Gauss-Legendre rule needs n >= 1");
  // P_n(x) and P_n'(x)
  const auto legendre = [n](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex& v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& m) {
  return m.norm();  // Frobenius, an upper bound for the spectral norm
}

template <class Value>
Value zero_like(const Value& v) {
  if constexpr (std::is_arithmetic_v<Value>) {
    return Value{0};
  } else if constexpr (std::is_same_v<Value, Complex>) {
    return Complex{0.0, 0.0};
  } else {
    return Value::Zero(v.rows(), v.cols());
  }
}

struct PanelOptions {
  int nodes = 20;               // points of the primary rule; the embedded rule uses nodes / 2
  double max_width = 4.0;       // initial panel width cap
  int min_panels = 1;
  double rel_tol = 1e-10;       // relative to the integrated magnitude
  double abs_tol = 0.0;
  int max_depth = 12;
  std::size_t max_panels = 200000;
};

template <class Value>
struct QuadratureSum {
  Value value;
  double error = 0.0;       // sum of embedded-rule differences plus a rounding floor
  double mass = 0.0;        // integral of the integrand magnitude
  std::size_t panels = 0;
  std::size_t evaluations = 0;
  bool converged = true;
};

namespace detail {

template <class Value>
struct Panel {
  double lo, hi;
  int depth;
  Value full;
  double diff;
  double mass;
};

template <class Value, class F>
Panel<Value> eval_panel(F& f, double lo, double hi, int depth, const GaussRule& full,
                        const GaussRule& half, std::size_t& evals) {
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  Value acc_full{};
  double mass = 0.0;
  for (std::size_t i = 0; i < full.nodes.size(); ++i) {
    Value v = f(c + h * full.nodes[i]);
    if (i == 0) acc_full = zero_like(v);
    acc_full += (h * full.weights[i]) * v;
    mass += h * full.weights[i] * magnitude(v);
  }
  Value acc_half = zero_like(acc_full);
  for (std::size_t i = 0; i < half.nodes.size(); ++i) acc_half += (h * half.weights[i]) * f(c + h * half.nodes[i]);
  evals += full.nodes.size() + half.nodes.size();
  const double diff = magnitude(acc_full - acc_half);
  return Panel<Value>{lo, hi, depth, std::move(acc_full), diff, mass};
}

}  // namespace detail

/// Integrates f over [lo, hi] (lo < hi) with adaptive panel bisection.
template <class F>
auto integrate_panels(F&& f, double lo, double hi, const PanelOptions& opt)
    -> QuadratureSum<std::decay_t<decltype(f(0.0))>> {
  using Value = std::decay_t<decltype(f(0.0))>;
  if (!(hi > lo)) throw Error(Errc::InvalidArgument, "integrate_panels: empty interval");
  if (opt.nodes < 2) throw Error(Errc::InvalidArgument, "integrate_panels: need at least 2 nodes");
  const GaussRule full = gauss_legendre(opt.nodes);
  const GaussRule half = gauss_legendre(std::max(1, opt.nodes / 2));

  const double width = hi - lo;
  const std::size_t n0 = std::max<std::size_t>(
      static_cast<std::size_t>(std::max(1, opt.min_panels)),
      static_cast<std::size_t>(std::ceil(width / opt.max_width - 1e-12)));
  if (n0 > opt.max_panels) throw Error(Errc::QuadratureFailed, "panel budget exceeded");

  QuadratureSum<Value> out;
  std::vector<detail::Panel<Value>> panels;
  panels.reserve(n0);
  for (std::size_t i = 0; i < n0; ++i) {
    const double a = lo + width * static_cast<double>(i) / static_cast<double>(n0);
    const double b = (i + 1 == n0) ? hi : lo + width * static_cast<double>(i + 1) / static_cast<double>(n0);
    panels.push_back(detail::eval_panel<Value>(f, a, b, 0, full, half, out.evaluations));
  }

  for (;;) {
    double mass = 0.0;
    for (const auto& p : panels) mass += p.mass;
    const double tol = std::max(opt.abs_tol, opt.rel_tol * mass);
    bool split_any = false;
    std::vector<detail::Panel<Value>> next;
    next.reserve(panels.size());
    for (auto& p : panels) {
      const double share = tol * (p.hi - p.lo) / width;
      if (p.diff > share && p.depth < opt.max_depth && next.size() + 2 <= opt.max_panels) {
        const double mid = 0.5 * (p.lo + p.hi);
        next.push_back(detail::eval_panel<Value>(f, p.lo, mid, p.depth + 1, full, half, out.evaluations));
        next.push_back(detail::eval_panel<Value>(f, mid, p.hi, p.depth + 1, full, half, out.evaluations));
        split_any = true;
      } else {
        if (p.diff > share) out.converged = false;
        next.push_back(std::move(p));
      }
    }
    panels = std::move(next);
    if (!split_any) break;
    out.converged = true;
  }

  out.value = zero_like(panels.front().full);
  for (const auto& p : panels) {
    out.value += p.full;
    out.error += p.diff;
    out.mass += p.mass;
  }
  out.error += 64.0 * kEps * out.mass;
  out.panels = panels.size();
  return out;
}

}  // namespace hk
