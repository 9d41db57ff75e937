#pragma once

// Heinz-Kato verification harness.
//
// Hypothesis ||B T u|| <= M ||A u|| for all u is, for invertible A, the statement
// ||B T A^{-1}|| <= M; the least such M is used. The conclusion ||B^a T u|| <= C ||A^a u||
// is checked in operator form, lhs = ||B^a T A^{-a}||, against
//
//   bound1 = M^a ||T||^{1-a}                                                   (A, B Hermitian PD)
//   bound2 = M_A M_B M^a exp((phi_A^2 + phi_B^2)/4 + 2 max(a, 1-a)^2) ||T||^{1-a}
//   bound3 = M_A M_B M^a exp((phi_A + phi_B) sqrt(a (1-a))) ||T||^{1-a}
//
// and the three-lines function of the second bound's complex-analytic proof,
//
//   f(z) = exp(xi z (z-1)) <v, B^{1-z} T A^{z+a-1} u>,   xi = (phi_A + phi_B) / (2 sqrt(a(1-a))),
//
// is traced on the lines Re z = 0 and Re z = 1 and at z = 1 - a.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hk/bip.hpp"
#include "hk/cmatrix.hpp"
#include "hk/defaults.hpp"
#include "hk/error.hpp"
#include "hk/parallel.hpp"
#include "hk/powers.hpp"
#include "hk/sectorial.hpp"

namespace hk {

/// Shift applied to an operator that is singular to working precision.
inline constexpr double kSingularShift = 1e-6;

struct HeinzKatoInstance {
  CMatrix a, b, t;
  BipCertificate bip_a, bip_b;
  SectorialCertificate cert_a, cert_b;
  double m = 0.0;
  double norm_t = 0.0;
  bool shifted_a = false;
  bool shifted_b = false;
  std::string label;
};

inline double compute_m(const CMatrix& a, const CMatrix& b, const CMatrix& t) {
  require_square(a, "A");
  require_square(b, "B");
  if (t.rows() != b.rows() || t.cols() != a.rows())
    throw Error(Errc::ShapeMismatch, "T must be n2 x n1 for A n1 x n1 and B n2 x n2");
  // B T A^{-1} = (A^{-H} (B T)^H)^H
  const CMatrix bt = matmul(b, t);
  const CMatrix x = solve(a.adjoint(), bt.adjoint()).adjoint();
  return spectral_norm(x);
}

namespace detail {

inline SectorialCertificate certify_or_shift(CMatrix& op, bool& shifted) {
  try {
    return certify_invertible_sectorial(op);
  } catch (const ResolventSingularError& e) {
    if (e.shift() != 0.0) throw;
  }
  op.diagonal().array() += kSingularShift;
  shifted = true;
  return certify_invertible_sectorial(op);
}

}  // namespace detail

/// Certifies A and B (shifting a singular operator by 1e-6), and computes M and ||T||.
inline HeinzKatoInstance make_instance(CMatrix a, CMatrix b, CMatrix t, BipCertificate bip_a,
                                       BipCertificate bip_b, std::string label = {}) {
  require_square(a, "A");
  require_square(b, "B");
  if (t.rows() != b.rows() || t.cols() != a.rows())
    throw Error(Errc::ShapeMismatch, "T must be n2 x n1 for A n1 x n1 and B n2 x n2");
  HeinzKatoInstance inst;
  inst.cert_a = detail::certify_or_shift(a, inst.shifted_a);
  inst.cert_b = detail::certify_or_shift(b, inst.shifted_b);
  inst.a = std::move(a);
  inst.b = std::move(b);
  inst.t = std::move(t);
  inst.bip_a = std::move(bip_a);
  inst.bip_b = std::move(bip_b);
  inst.m = compute_m(inst.a, inst.b, inst.t);
  inst.norm_t = spectral_norm(inst.t);
  inst.label = std::move(label);
  return inst;
}

inline double bound_hilbert(double m, double norm_t, double a) {
  return std::pow(m, a) * std::pow(norm_t, 1.0 - a);
}

inline double bound_interpolation(const BipCertificate& bip_a, const BipCertificate& bip_b, double m, double norm_t,
                         double a) {
  const double mx = std::max(a, 1.0 - a);
  return bip_a.M * bip_b.M * std::pow(m, a) *
         std::exp((bip_a.phi * bip_a.phi + bip_b.phi * bip_b.phi) / 4.0 + 2.0 * mx * mx) *
         std::pow(norm_t, 1.0 - a);
}

inline double bound_three_lines(const BipCertificate& bip_a, const BipCertificate& bip_b, double m, double norm_t,
                         double a) {
  return bip_a.M * bip_b.M * std::pow(m, a) * std::exp((bip_a.phi + bip_b.phi) * std::sqrt(a * (1.0 - a))) *
         std::pow(norm_t, 1.0 - a);
}

enum class LhsRoute { Auto, Oracle, Quadrature };

struct LhsValue {
  double value = 0.0;
  double error = 0.0;
  LhsRoute route = LhsRoute::Oracle;
};

/// Evaluates ||B^a T A^{-a}|| for many a; the eigendecompositions are computed once.
class LhsEvaluator {
 public:
  LhsEvaluator(const HeinzKatoInstance& inst, LhsRoute route, QuadratureConfig cfg)
      : inst_(inst), cfg_(cfg), route_(route) {
    if (route == LhsRoute::Quadrature) return;
    try {
      calc_a_.emplace(inst.a);
      calc_b_.emplace(inst.b);
      route_ = LhsRoute::Oracle;
    } catch (const Error& e) {
      if (route == LhsRoute::Oracle || e.code() != Errc::NonDiagonalizable) throw;
      calc_a_.reset();
      calc_b_.reset();
      route_ = LhsRoute::Quadrature;
    }
  }

  LhsRoute route() const { return route_; }

  LhsValue operator()(double a) const {
    if (!(a > 0.0 && a < 1.0)) throw Error(Errc::AlphaOutOfRange, "exponent must lie in (0, 1)");
    CMatrix ba, ama;
    double err_b = 0.0, err_a = 0.0;
    if (route_ == LhsRoute::Oracle) {
      ba = calc_b_->power(Complex(a, 0.0));
      ama = calc_a_->power(Complex(-a, 0.0));
      err_b = calc_b_->relative_error() * ba.norm();
      err_a = calc_a_->relative_error() * ama.norm();
    } else {
      PowerResult pb = pos_power(inst_.b, a, cfg_);
      PowerResult pa = balakrishnan_neg_power(inst_.a, a, cfg_);
      ba = std::move(pb.value);
      ama = std::move(pa.value);
      err_b = pb.error_estimate;
      err_a = pa.error_estimate;
    }
    const CMatrix x = ba * inst_.t * ama;
    LhsValue out;
    out.route = route_;
    out.value = spectral_norm(x);
    const double nb = ba.norm(), na = ama.norm(), nt = inst_.norm_t;
    out.error = err_b * nt * na + nb * nt * err_a + err_b * nt * err_a + 16.0 * kEps * x.norm();
    return out;
  }

 private:
  const HeinzKatoInstance& inst_;
  QuadratureConfig cfg_;
  LhsRoute route_;
  std::optional<SpectralCalculus> calc_a_, calc_b_;
};

inline LhsValue lhs_norm(const HeinzKatoInstance& inst, double a, const QuadratureConfig& cfg = {},
                         LhsRoute route = LhsRoute::Auto) {
  return LhsEvaluator(inst, route, cfg)(a);
}

enum class RowStatus { Ok, QuadratureFailed };

struct HeinzKatoRow {
  double a = 0.0;
  RowStatus status = RowStatus::Ok;
  double lhs = 0.0;
  double lhs_error = 0.0;
  std::optional<double> bound1;
  double bound2 = 0.0;
  double bound3 = 0.0;
  std::optional<double> margin1;
  double margin2 = 0.0;
  double margin3 = 0.0;
  std::optional<bool> pass1;
  bool pass2 = false;
  bool pass3 = false;
  bool pass = false;
  std::string note;
};

struct HeinzKatoReport {
  std::string label;
  int n1 = 0, n2 = 0;
  double m = 0.0;
  double norm_t = 0.0;
  double k_a = 1.0, k_b = 1.0;
  BipCertificate bip_a, bip_b;
  bool shifted_a = false, shifted_b = false;
  bool hilbert_applicable = false;
  bool fitted_bip = false;
  std::string lhs_route;
  std::vector<HeinzKatoRow> rows;
  double worst_margin = std::numeric_limits<double>::infinity();
  double max_ratio2 = 0.0;  // max lhs / bound2 over rows
  double max_ratio3 = 0.0;
  int violations = 0;
  int failed_rows = 0;
  bool all_pass = true;
};

inline HeinzKatoReport check_inequality(const HeinzKatoInstance& inst, const std::vector<double>& a_grid,
                                        const QuadratureConfig& cfg = {}, LhsRoute route = LhsRoute::Auto) {
  if (a_grid.empty()) throw Error(Errc::InvalidArgument, "empty exponent grid");
  for (double a : a_grid)
    if (!(a > 0.0 && a < 1.0)) throw Error(Errc::AlphaOutOfRange, "exponent grid must lie in (0, 1)");

  HeinzKatoReport rep;
  rep.label = inst.label;
  rep.n1 = static_cast<int>(inst.a.rows());
  rep.n2 = static_cast<int>(inst.b.rows());
  rep.m = inst.m;
  rep.norm_t = inst.norm_t;
  rep.k_a = inst.cert_a.constant;
  rep.k_b = inst.cert_b.constant;
  rep.bip_a = inst.bip_a;
  rep.bip_b = inst.bip_b;
  rep.shifted_a = inst.shifted_a;
  rep.shifted_b = inst.shifted_b;
  rep.fitted_bip = !is_analytic(inst.bip_a.provenance) || !is_analytic(inst.bip_b.provenance);
  rep.hilbert_applicable = !inst.shifted_a && !inst.shifted_b && is_hermitian_positive_definite(inst.a) &&
                            is_hermitian_positive_definite(inst.b);

  const LhsEvaluator lhs(inst, route, cfg);
  rep.lhs_route = lhs.route() == LhsRoute::Oracle ? "Oracle" : "Quadrature";
  rep.rows.resize(a_grid.size());
  parallel_for(a_grid.size(), [&](std::size_t i) {
    HeinzKatoRow& row = rep.rows[i];
    row.a = a_grid[i];
    row.bound2 = bound_interpolation(inst.bip_a, inst.bip_b, inst.m, inst.norm_t, row.a);
    row.bound3 = bound_three_lines(inst.bip_a, inst.bip_b, inst.m, inst.norm_t, row.a);
    if (rep.hilbert_applicable) row.bound1 = bound_hilbert(inst.m, inst.norm_t, row.a);
    try {
      const LhsValue v = lhs(row.a);
      row.lhs = v.value;
      row.lhs_error = v.error;
    } catch (const Error& e) {
      row.status = RowStatus::QuadratureFailed;
      row.note = e.what();
      return;
    }
    row.margin2 = row.bound2 - row.lhs;
    row.margin3 = row.bound3 - row.lhs;
    row.pass2 = row.lhs <= row.bound2 + row.lhs_error;
    row.pass3 = row.lhs <= row.bound3 + row.lhs_error;
    row.pass = row.pass2 && row.pass3;
    if (row.bound1) {
      row.margin1 = *row.bound1 - row.lhs;
      row.pass1 = row.lhs <= *row.bound1 + row.lhs_error;
      row.pass = row.pass && *row.pass1;
    }
  });

  for (const auto& row : rep.rows) {
    if (row.status != RowStatus::Ok) {
      ++rep.failed_rows;
      rep.all_pass = false;
      continue;
    }
    rep.worst_margin = std::min({rep.worst_margin, row.margin2, row.margin3});
    if (row.margin1) rep.worst_margin = std::min(rep.worst_margin, *row.margin1);
    rep.max_ratio2 = std::max(rep.max_ratio2, row.lhs / row.bound2);
    rep.max_ratio3 = std::max(rep.max_ratio3, row.lhs / row.bound3);
    if (!row.pass) {
      ++rep.violations;
      rep.all_pass = false;
    }
  }
  return rep;
}

struct ThreeLinesPoint {
  double t;
  double left;   // |f(it)|
  double right;  // |f(1+it)|
};

struct ThreeLinesTrace {
  double a = 0.0;
  double phi = 0.0;
  double xi = 0.0;
  double sup0 = 0.0;  // max over the grid of |f(it)|
  double sup1 = 0.0;  // max over the grid of |f(1+it)|
  double t_sup0 = 0.0;
  double t_sup1 = 0.0;
  bool sup0_interior = false;
  bool sup1_interior = false;
  double center = 0.0;  // |f(1-a)|
  double bound = 0.0;   // sup0^a sup1^{1-a}
  bool holds = false;
  std::vector<ThreeLinesPoint> points;
};

/// Evaluates the three-lines function with the inner product <v, x> = v^H x.
inline ThreeLinesTrace three_lines_trace(const HeinzKatoInstance& inst, double a, const CVector& u,
                                         const CVector& v, const std::vector<double>& t_grid,
                                         const QuadratureConfig& cfg = {}) {
  if (!(a > 0.0 && a < 1.0)) throw Error(Errc::AlphaOutOfRange, "exponent must lie in (0, 1)");
  if (u.size() != inst.a.rows() || v.size() != inst.b.rows())
    throw Error(Errc::ShapeMismatch, "u must match A and v must match B");
  if (u.norm() == 0.0 || v.norm() == 0.0) throw Error(Errc::InvalidArgument, "u and v must be nonzero");
  if (t_grid.empty()) throw Error(Errc::InvalidArgument, "empty t grid");

  std::optional<SpectralCalculus> ca, cb;
  try {
    ca.emplace(inst.a);
    cb.emplace(inst.b);
  } catch (const Error& e) {
    if (e.code() != Errc::NonDiagonalizable) throw;
    ca.reset();
    cb.reset();
  }

  ThreeLinesTrace tr;
  tr.a = a;
  tr.phi = inst.bip_a.phi + inst.bip_b.phi;
  tr.xi = tr.phi > 0.0 ? tr.phi / (2.0 * std::sqrt(a * (1.0 - a))) : 0.0;

  const auto f = [&](Complex z) -> Complex {
    CVector x;
    if (ca) {
      x = cb->apply(1.0 - z, inst.t * ca->apply(z + a - 1.0, u));
    } else {
      const CMatrix pa = quadrature_power(inst.a, z + a - 1.0, cfg, inst.cert_a).value;
      const CMatrix pb = quadrature_power(inst.b, 1.0 - z, cfg, inst.cert_b).value;
      x = pb * (inst.t * (pa * u));
    }
    return std::exp(tr.xi * z * (z - 1.0)) * v.dot(x);
  };

  tr.points.reserve(t_grid.size());
  std::size_t i0 = 0, i1 = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const double left = std::abs(f(Complex(0.0, t)));
    const double right = std::abs(f(Complex(1.0, t)));
    tr.points.push_back({t, left, right});
    if (left > tr.sup0 || i == 0) tr.sup0 = left, i0 = i;
    if (right > tr.sup1 || i == 0) tr.sup1 = right, i1 = i;
  }
  tr.t_sup0 = t_grid[i0];
  tr.t_sup1 = t_grid[i1];
  tr.sup0_interior = i0 != 0 && i0 + 1 != t_grid.size();
  tr.sup1_interior = i1 != 0 && i1 + 1 != t_grid.size();
  tr.center = std::abs(f(Complex(1.0 - a, 0.0)));
  tr.bound = std::pow(tr.sup0, a) * std::pow(tr.sup1, 1.0 - a);
  tr.holds = tr.center <= tr.bound * (1.0 + 1e-9);
  return tr;
}

}  // namespace hk
