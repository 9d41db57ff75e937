// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any criterion fails.
// Reference values come from the independent computations in oracles.hpp.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hk/bip.hpp"
#include "hk/defaults.hpp"
#include "hk/gen.hpp"
#include "hk/heinzkato.hpp"
#include "hk/powers.hpp"
#include "hk/sectorial.hpp"
#include "oracles.hpp"

using hk::CMatrix;
using hk::Complex;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

hk::GeneratedOperator make(hk::InstanceClass cls, std::uint64_t seed, int n) {
  hk::InstanceSpec spec;
  spec.cls = cls;
  spec.seed = seed;
  return hk::gen_operator(spec, n);
}

CMatrix structured_power(const hk::GeneratedOperator& g, Complex z) {
  if (g.structure.cls == hk::InstanceClass::JordanBlock)
    return oracle::jordan_power(g.structure.jordan_lambda, g.structure.dim, z);
  return oracle::similar_power(g.structure.similarity, g.structure.diagonal, z);
}

// 1. Balakrishnan quadrature against diagonal powers.
Outcome oracle_agreement() {
  Eigen::VectorXd d(10);
  for (int i = 0; i < 10; ++i) d(i) = i + 1.0;
  const CMatrix a = d.cast<Complex>().asDiagonal();
  double worst = 0.0, slowest = 0.0;
  for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto t0 = Clock::now();
    const auto r = hk::balakrishnan_neg_power(a, alpha);
    slowest = std::max(slowest, seconds_since(t0));
    worst = std::max(worst, oracle::rel_err(r.value, oracle::diag_power(d, -alpha)));
  }
  return {worst <= 1e-6 && slowest < 1.0,
          "max rel err " + fmt(worst) + " (<= 1e-6), slowest " + fmt(slowest) + " s (< 1 s)"};
}

std::vector<hk::GeneratedOperator> normal_corpus() {
  std::vector<hk::GeneratedOperator> out;
  for (std::uint64_t s = 0; s < 20; ++s) out.push_back(make(hk::InstanceClass::NormalSector, 1000 + s, 8));
  return out;
}

// 2. Dunford against Balakrishnan.
Outcome route_agreement(const std::vector<hk::GeneratedOperator>& corpus) {
  double worst_abs = 0.0, worst_ratio = 0.0;
  bool ok = true;
  for (const auto& g : corpus) {
    const auto cert = hk::certify_invertible_sectorial(g.matrix);
    const auto du = hk::dunford_power(g.matrix, -0.5, cert);
    const auto ba = hk::balakrishnan_neg_power(g.matrix, 0.5);
    const double diff = oracle::norm2(du.value - ba.value);
    const double budget = du.error_estimate + ba.error_estimate;
    worst_abs = std::max(worst_abs, diff);
    worst_ratio = std::max(worst_ratio, diff / budget);
    ok = ok && diff <= budget && diff <= 1e-5;
  }
  return {ok, "max diff " + fmt(worst_abs) + " (<= 1e-5), max diff/estimates " + fmt(worst_ratio) + " (<= 1)"};
}

// 3. Semigroup property.
Outcome semigroup(const std::vector<hk::GeneratedOperator>& corpus) {
  double worst = 0.0;
  for (const auto& g : corpus) {
    const CMatrix p = hk::balakrishnan_neg_power(g.matrix, 0.3).value;
    const CMatrix q = hk::balakrishnan_neg_power(g.matrix, 0.4).value;
    const CMatrix pq = hk::balakrishnan_neg_power(g.matrix, 0.7).value;
    worst = std::max(worst, oracle::norm2(oracle::naive_matmul(p, q) - pq) / oracle::norm2(pq));
  }
  return {worst <= 1e-6, "max relative defect " + fmt(worst) + " (<= 1e-6)"};
}

// 4. Imaginary powers.
Outcome imaginary_powers() {
  double worst = 0.0, worst_unit = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto cls = s % 2 ? hk::InstanceClass::SimilarityPerturbed : hk::InstanceClass::NormalSector;
    const auto g = make(cls, 2000 + s, 6);
    for (double t : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
      const CMatrix q = hk::imaginary_power(g.matrix, t).value;
      worst = std::max(worst, oracle::rel_err(q, structured_power(g, Complex(0.0, t))));
      if (cls == hk::InstanceClass::NormalSector) worst_unit = std::max(worst_unit, std::abs(oracle::norm2(q) - 1.0));
    }
  }
  return {worst <= 1e-4 && worst_unit <= 1e-6,
          "max rel err " + fmt(worst) + " (<= 1e-4), max | ||A^it|| - 1 | on normal " + fmt(worst_unit) + " (<= 1e-6)"};
}

// 5. Extended calculus approximants converge to B^eta.
Outcome extended_calculus() {
  Eigen::VectorXd d(2);
  d << 1.0, 3.0;
  const CMatrix b = d.cast<Complex>().asDiagonal();
  const CMatrix target = oracle::diag_power(d, 0.5);
  const auto cert = hk::certify_sectorial(b);
  std::vector<double> errs;
  for (double k : {10.0, 100.0, 1000.0})
    errs.push_back(oracle::norm2(hk::extended_power_q(b, 0.5, 2, k, cert).value - target));
  const bool decreasing = errs[0] > errs[1] && errs[1] > errs[2];
  return {decreasing && errs[2] <= 1e-3, "errors at k = 10, 100, 1000: " + fmt(errs[0]) + ", " + fmt(errs[1]) +
                                             ", " + fmt(errs[2]) + " (strictly decreasing, last <= 1e-3)"};
}

struct Corpus {
  std::vector<hk::HeinzKatoInstance> instances;
  double build_seconds = 0.0;
};

Corpus heinz_kato_corpus() {
  Corpus c;
  const auto t0 = Clock::now();
  const hk::InstanceClass classes[] = {hk::InstanceClass::HermitianDiag, hk::InstanceClass::NormalSector,
                                       hk::InstanceClass::SimilarityPerturbed, hk::InstanceClass::JordanBlock};
  for (auto cls : classes) {
    for (std::uint64_t i = 0; i < 50; ++i) {
      hk::InstanceSpec spec;
      spec.cls = cls;
      spec.seed = 3000 + i;
      hk::SplitMix64 dims(hk::derive_seed(spec.seed, 9));
      spec.n1 = 1 + static_cast<int>(dims.next() % 16);
      spec.n2 = 1 + static_cast<int>(dims.next() % 16);
      const auto g = hk::gen_instance(spec);
      c.instances.push_back(hk::make_instance(g.a, g.b, g.t, hk::analytic_bip(g.a, *g.structure_a),
                                              hk::analytic_bip(g.b, *g.structure_b), hk::to_string(cls)));
    }
  }
  c.build_seconds = seconds_since(t0);
  return c;
}

// 6. Interpolation and three-lines bounds over the generated corpus.
Outcome heinz_kato_general(const Corpus& corpus) {
  const auto t0 = Clock::now();
  int v2 = 0, v3 = 0, failed = 0, rows = 0;
  double worst2 = 0.0, worst3 = 0.0;
  for (const auto& inst : corpus.instances) {
    const auto rep = hk::check_inequality(inst, hk::defaults::heinz_kato_a_grid());
    for (const auto& row : rep.rows) {
      ++rows;
      if (row.status != hk::RowStatus::Ok) {
        ++failed;
        continue;
      }
      v2 += row.lhs > row.bound2 + row.lhs_error;
      v3 += row.lhs > row.bound3 + row.lhs_error;
      worst2 = std::max(worst2, row.lhs / row.bound2);
      worst3 = std::max(worst3, row.lhs / row.bound3);
    }
  }
  const double elapsed = seconds_since(t0) + corpus.build_seconds;
  return {v2 == 0 && v3 == 0 && failed == 0 && elapsed < 120.0,
          std::to_string(corpus.instances.size()) + " instances, " + std::to_string(rows) + " rows: violations " +
              std::to_string(v2) + " / " + std::to_string(v3) + ", failed rows " + std::to_string(failed) +
              ", max lhs/bound " + fmt(worst2) + " / " + fmt(worst3) + ", " + fmt(elapsed) + " s (< 120 s)"};
}

// 7. Hilbert-space bound on Hermitian diagonal instances plus a closed-form row.
Outcome heinz_kato_hilbert() {
  int violations = 0, rows = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    hk::InstanceSpec spec;
    spec.seed = 4000 + i;
    spec.n1 = 2 + static_cast<int>(i % 7);
    spec.n2 = 2 + static_cast<int>((3 * i) % 5);
    const auto g = hk::gen_instance(spec);
    const auto inst = hk::make_instance(g.a, g.b, g.t, hk::analytic_bip(g.a, *g.structure_a),
                                        hk::analytic_bip(g.b, *g.structure_b));
    for (const auto& row : hk::check_inequality(inst, hk::defaults::heinz_kato_a_grid()).rows) {
      ++rows;
      if (!row.bound1 || row.status != hk::RowStatus::Ok || row.lhs > *row.bound1 + row.lhs_error) ++violations;
    }
  }
  // A = diag(1, 4), B = diag(1, 9), T = I: B T A^{-1} = diag(1, 9/4), so M = 9/4 and
  // M^{1/2} = 3/2; B^{1/2} A^{-1/2} = diag(1, 3/2) gives lhs = 3/2.
  Eigen::VectorXd da(2), db(2);
  da << 1.0, 4.0;
  db << 1.0, 9.0;
  const auto exact = hk::make_instance(da.cast<Complex>().asDiagonal(), db.cast<Complex>().asDiagonal(),
                                       hk::identity(2), {}, {});
  const auto row = hk::check_inequality(exact, {0.5}).rows.front();
  const bool exact_ok = row.bound1 && std::abs(row.lhs - 1.5) <= 1e-12 && std::abs(*row.bound1 - 1.5) <= 1e-15 &&
                        std::abs(exact.m - 2.25) <= 1e-15 && row.pass1 && *row.pass1;
  return {violations == 0 && exact_ok,
          std::to_string(rows) + " rows, violations " + std::to_string(violations) +
              "; exact row lhs " + fmt(row.lhs) + " vs bound1 " + fmt(row.bound1.value_or(NAN)) + " (M = " +
              fmt(exact.m) + ")"};
}

// 8. Constant formulas.
Outcome constant_formulas() {
  const hk::BipCertificate unit;
  const double b2 = hk::bound_interpolation(unit, unit, 1.0, 1.0, 0.5);
  const double b3 = hk::bound_three_lines(unit, unit, 1.0, 1.0, 0.5);
  // direct evaluation: e^{(0 + 0)/4 + 2 (1/2)^2} and e^{0}
  const double d2 = std::exp(0.0 / 4.0 + 2.0 * 0.25), d3 = std::exp(0.0);
  return {std::abs(b2 - d2) <= 1e-15 && std::abs(b3 - d3) <= 1e-15,
          "bound2 = " + fmt(b2) + " (e^0.5), bound3 = " + fmt(b3) + " (1)"};
}

// 9. Three-lines inequality along the proof function.
Outcome three_lines() {
  int cases = 0, failures = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    hk::InstanceSpec spec;
    spec.cls = s % 2 ? hk::InstanceClass::SimilarityPerturbed : hk::InstanceClass::NormalSector;
    spec.seed = 5000 + s;
    spec.n1 = 4;
    spec.n2 = 3 + static_cast<int>(s % 3);
    const auto g = hk::gen_instance(spec);
    auto bip_a = hk::analytic_bip(g.a, *g.structure_a), bip_b = hk::analytic_bip(g.b, *g.structure_b);
    // a nonzero phi exercises the Gaussian factor
    if (s % 3 == 0) bip_a.phi = 0.5;
    const auto inst = hk::make_instance(g.a, g.b, g.t, bip_a, bip_b);
    hk::SplitMix64 rng(hk::derive_seed(spec.seed, 7));
    for (int p = 0; p < 5; ++p) {
      hk::CVector u(inst.a.rows()), v(inst.b.rows());
      for (auto& x : u) x = rng.complex_normal();
      for (auto& x : v) x = rng.complex_normal();
      for (double a : {0.25, 0.5, 0.75}) {
        const auto tr = hk::three_lines_trace(inst, a, u, v, hk::defaults::trace_t_grid());
        const double bound = std::pow(tr.sup0, a) * std::pow(tr.sup1, 1.0 - a);
        ++cases;
        if (!(tr.center <= bound * (1.0 + 1e-9))) ++failures;
        worst = std::max(worst, tr.center / bound);
      }
    }
  }
  return {failures == 0, std::to_string(cases) + " cases, failures " + std::to_string(failures) +
                             ", max center/bound " + fmt(worst) + " (<= 1 + 1e-9)"};
}

// 10. Resolvent bound on the boundary of Omega_K.
Outcome region_bound(const Corpus& corpus) {
  double worst = INFINITY;
  std::size_t samples = 0;
  for (const auto& inst : corpus.instances) {
    for (const auto* pair : {&inst.a, &inst.b}) {
      const auto& cert = pair == &inst.a ? inst.cert_a : inst.cert_b;
      for (const auto& s : hk::verify_region_bound(*pair, cert, hk::defaults::kRegionSamples)) {
        worst = std::min(worst, s.margin);
        ++samples;
      }
    }
  }
  return {worst >= -1e-9, std::to_string(samples) + " samples, min margin " + fmt(worst) + " (>= -1e-9)"};
}

// 11. Byte-identical CLI reports.
Outcome reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("hk_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string text[2];
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("run" + std::to_string(i) + ".json");
    const std::string cmd = std::string(HK_CLI_PATH) + " -o " + out.string() +
                            " heinz-kato --gen class=SimilarityPerturbed seed=42";
    const int status = std::system(cmd.c_str());
    codes[i] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::stringstream ss;
    ss << std::ifstream(out, std::ios::binary).rdbuf();
    text[i] = ss.str();
  }
  fs::remove_all(dir);
  const bool same = !text[0].empty() && text[0] == text[1];
  return {same && codes[0] == 0 && codes[1] == 0,
          std::to_string(text[0].size()) + " bytes, identical: " + (same ? "yes" : "no") +
              ", exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1])};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << "  " << name << ": " << o.detail << std::endl;
  };

  const auto normal = normal_corpus();
  report(1, "balakrishnan vs eigendecomposition", oracle_agreement);
  report(2, "dunford vs balakrishnan", [&] { return route_agreement(normal); });
  report(3, "semigroup", [&] { return semigroup(normal); });
  report(4, "imaginary powers", imaginary_powers);
  report(5, "extended calculus approximants", extended_calculus);
  const Corpus corpus = heinz_kato_corpus();
  report(6, "heinz-kato interpolation bounds", [&] { return heinz_kato_general(corpus); });
  report(7, "heinz-kato hilbert bound", heinz_kato_hilbert);
  report(8, "constant formulas", constant_formulas);
  report(9, "three-lines trace", three_lines);
  report(10, "omega_k resolvent bound", [&] { return region_bound(corpus); });
  report(11, "reproducible reports", reproducibility);
  std::cout << (11 - failures) << "/11 criteria pass" << std::endl;
  return failures == 0 ? 0 : 1;
}
