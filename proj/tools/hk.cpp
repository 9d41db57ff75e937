// hk: sectorial certificates, fractional powers, BIP constants and Heinz-Kato checks.
//
// Exit codes: 0 ok, 1 parse/argument error, 2 singular resolvent, 3 route precondition,
// 4 inequality violation or failed row, 5 missing/invalid structure for analytic BIP.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hk/bip.hpp"
#include "hk/defaults.hpp"
#include "hk/gen.hpp"
#include "hk/heinzkato.hpp"
#include "hk/json_io.hpp"
#include "hk/powers.hpp"
#include "hk/sectorial.hpp"

namespace {

using hk::io::json;

enum Exit { kOk = 0, kParse = 1, kSingular = 2, kRoute = 3, kViolation = 4, kStructure = 5 };

struct Fail {
  int code;
  std::string message;
};

int exit_code(hk::Errc c) {
  switch (c) {
    case hk::Errc::ResolventSingular:
    case hk::Errc::SingularMatrix: return kSingular;
    case hk::Errc::NonDiagonalizable:
    case hk::Errc::SpectrumOnCut:
    case hk::Errc::InvalidExponent:
    case hk::Errc::AlphaOutOfRange:
    case hk::Errc::ExponentNotNegative:
    case hk::Errc::RegularizerOrderTooLow:
    case hk::Errc::QuadratureFailed: return kRoute;
    case hk::Errc::StructureUnknown: return kStructure;
    default: return kParse;
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Fail{kParse, "cannot open '" + path + "'"};
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Fail{kParse, path + ": malformed JSON: " + e.what()};
  }
}

void write_json(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Fail{kParse, "cannot write '" + out + "'"};
  f << text;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw Fail{kParse, "cannot parse " + what + " '" + s + "'"};
  return v;
}

/// "re", "re+imi", "re-imi", "imi", "i", "-i".
hk::Complex parse_exponent(std::string s) {
  std::erase(s, ' ');
  if (s.empty()) throw Fail{kParse, "empty exponent"};
  if (s.back() != 'i') return {parse_double(s, "exponent"), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t p = s.size(); p-- > 1;) {
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : parse_double(re, "exponent"), parse_double(im, "exponent")};
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
  if (out.empty()) throw Fail{kParse, "empty " + what};
  return out;
}

struct MatrixFile {
  hk::CMatrix matrix;
  std::optional<hk::OperatorStructure> structure;
};

MatrixFile read_matrix(const std::string& path) {
  const json j = read_json(path);
  MatrixFile m;
  m.matrix = hk::io::matrix_from_json(j);
  if (const auto it = j.find("structure"); it != j.end() && !it->is_null())
    m.structure = hk::io::structure_from_json(*it);
  return m;
}

struct QuadFlags {
  hk::QuadratureConfig cfg;

  void add(CLI::App* app) {
    app->add_option("--nodes", cfg.nodes_per_panel, "Gauss-Legendre nodes per panel");
    app->add_option("--panels", cfg.panel_count, "initial panel count on the truncation interval");
    app->add_option("--lower", cfg.lower, "lower truncation in x = ln s");
    app->add_option("--upper", cfg.upper, "upper truncation in x = ln s");
    app->add_option("--tail-tol", cfg.tail_tol, "truncation tail tolerance");
    app->add_option("--rel-tol", cfg.rel_tol, "panel refinement tolerance");
  }
};

struct GenFlags {
  std::vector<std::string> tokens;
  std::optional<std::uint64_t> seed;
  double norm_t = 1.0;

  void add(CLI::App* app) {
    app->add_option("--gen", tokens, "generate an instance: class=C seed=N n1=.. n2=.. lmin=.. lmax=.. cond=..")
        ->expected(1, -1);
    app->add_option("--seed", seed, "generator seed (overrides seed= in --gen)");
    app->add_option("--norm-t", norm_t, "spectral norm of the generated T");
  }

  bool active() const { return !tokens.empty() || seed.has_value(); }

  hk::InstanceSpec spec() const {
    hk::InstanceSpec s;
    for (const auto& tok : tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw Fail{kParse, "--gen expects key=value, got '" + tok + "'"};
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      try {
        if (key == "class") {
          s.cls = hk::instance_class_from_string(val);
        } else if (key == "seed") {
          s.seed = std::stoull(val);
        } else if (key == "n1") {
          s.n1 = std::stoi(val);
        } else if (key == "n2") {
          s.n2 = std::stoi(val);
        } else if (key == "n") {
          s.n1 = s.n2 = std::stoi(val);
        } else if (key == "lmin") {
          s.lambda_min = parse_double(val, key);
        } else if (key == "lmax") {
          s.lambda_max = parse_double(val, key);
        } else if (key == "cond") {
          s.cond_target = parse_double(val, key);
        } else {
          throw Fail{kParse, "unknown --gen key '" + key + "'"};
        }
      } catch (const std::logic_error&) {
        throw Fail{kParse, "bad value for --gen key '" + key + "'"};
      }
    }
    if (seed) s.seed = *seed;
    s.validate();
    return s;
  }

  std::string label() const {
    const auto s = spec();
    return "gen:class=" + hk::to_string(s.cls) + ",seed=" + std::to_string(s.seed);
  }
};

hk::InstanceBundle load_bundle(const std::string& path, const GenFlags& gen) {
  if (gen.active()) {
    if (!path.empty()) throw Fail{kParse, "give either an instance file or --gen, not both"};
    return hk::gen_instance(gen.spec(), gen.norm_t);
  }
  if (path.empty()) throw Fail{kParse, "an instance file or --gen is required"};
  return hk::io::bundle_from_json(read_json(path));
}

hk::BipCertificate make_bip(const hk::CMatrix& a, const std::optional<hk::OperatorStructure>& st,
                            const std::string& mode, const std::string& which,
                            const std::vector<double>& t_grid, const hk::QuadratureConfig& cfg) {
  const bool analytic = mode == "analytic" || (mode == "auto" && st.has_value());
  if (analytic) {
    if (!st) throw Fail{kStructure, "bip=analytic needs structure metadata for " + which};
    return hk::analytic_bip(a, *st);
  }
  return hk::fit_bip(hk::sample_imaginary_norms(a, t_grid, cfg), hk::defaults::bip_phi_grid());
}

std::vector<double> t_range(double t_min, double t_max, int points) {
  if (points < 1 || !(t_min <= t_max)) throw Fail{kParse, "empty t-range"};
  auto grid = hk::defaults::linspace(t_min, t_max, points);
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heinz-Kato inequality checks for sectorial matrices"};
  app.require_subcommand(1);
  std::string out;
  app.add_option("-o,--output", out, "output file (default stdout)");

  // certify
  auto* certify = app.add_subcommand("certify", "sectorial certificate of a matrix");
  std::string certify_in, certify_kind = "invertible";
  double s_min = hk::defaults::kScanSMin, s_max = hk::defaults::kScanSMax;
  int scan_points = hk::defaults::kScanPoints;
  certify->add_option("matrix", certify_in, "matrix JSON file")->required();
  certify->add_option("--kind", certify_kind, "invertible | sectorial")
      ->check(CLI::IsMember({"invertible", "sectorial"}));
  certify->add_option("--s-min", s_min, "smallest scanned s (sectorial)");
  certify->add_option("--s-max", s_max, "largest scanned s");
  certify->add_option("--grid", scan_points, "log-grid points");

  // power
  auto* power = app.add_subcommand("power", "fractional power of a matrix");
  std::string power_in, exponent, method = "auto";
  int q_order = 2;
  double q_k = 100.0;
  QuadFlags power_quad;
  power->add_option("matrix", power_in, "matrix JSON file")->required();
  power->add_option("-z,--exponent", exponent, "complex exponent re[+im i]")->required()->allow_extra_args(false);
  power->add_option("--method", method, "auto | oracle | balakrishnan | dunford | imaginary | quadrature | extended")
      ->check(CLI::IsMember({"auto", "oracle", "balakrishnan", "dunford", "imaginary", "quadrature", "extended"}));
  power->add_option("--m", q_order, "regularizer order (extended)");
  power->add_option("--k", q_k, "regularizer parameter (extended)");
  power_quad.add(power);

  // bip
  auto* bip = app.add_subcommand("bip", "bounded-imaginary-powers certificate");
  std::string bip_in, bip_mode = "auto";
  double t_min = -hk::defaults::kBipTMax, t_max = hk::defaults::kBipTMax;
  int t_points = hk::defaults::kBipTPoints;
  double phi_max = hk::defaults::kBipPhiMax;
  int phi_points = hk::defaults::kBipPhiPoints;
  QuadFlags bip_quad;
  bip->add_option("matrix", bip_in, "matrix JSON file")->required();
  bip->add_option("--mode", bip_mode, "auto | analytic | fitted")->check(CLI::IsMember({"auto", "analytic", "fitted"}));
  bip->add_option("--t-min", t_min, "smallest sampled t");
  bip->add_option("--t-max", t_max, "largest sampled t");
  bip->add_option("--t-points", t_points, "number of sampled t");
  bip->add_option("--phi-max", phi_max, "largest fitted phi");
  bip->add_option("--phi-points", phi_points, "phi grid points");
  bip_quad.add(bip);

  // heinz-kato
  auto* hkc = app.add_subcommand("heinz-kato", "check the Heinz-Kato bounds on an instance");
  std::string hk_in, a_grid_text, hk_bip = "analytic", lhs_route = "auto";
  GenFlags hk_gen;
  QuadFlags hk_quad;
  hkc->add_option("instance", hk_in, "instance bundle JSON file");
  hkc->add_option("--a-grid", a_grid_text, "comma-separated exponents in (0,1) (default 0.05..0.95)");
  hkc->add_option("--bip", hk_bip, "analytic | fitted")->check(CLI::IsMember({"analytic", "fitted"}));
  hkc->add_option("--lhs", lhs_route, "auto | oracle | quadrature")
      ->check(CLI::IsMember({"auto", "oracle", "quadrature"}));
  hk_gen.add(hkc);
  hk_quad.add(hkc);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance bundle {A, B, T, structure}");
  GenFlags gen_flags;
  gen_flags.add(gen);

  // trace
  auto* trace = app.add_subcommand("trace", "three-lines trace of f(z) = <B^{1-z} T A^{z+a-1} u, v>");
  std::string trace_in, trace_bip = "analytic";
  double trace_a = 0.5;
  std::uint64_t uv_seed = 0;
  double trace_tmax = hk::defaults::kTraceTMax;
  int trace_points = hk::defaults::kTraceTPoints;
  GenFlags trace_gen;
  QuadFlags trace_quad;
  trace->add_option("instance", trace_in, "instance bundle JSON file");
  trace->add_option("-a", trace_a, "interpolation exponent in (0,1)");
  trace->add_option("--uv-seed", uv_seed, "seed of the random vectors u, v");
  trace->add_option("--t-max", trace_tmax, "t grid half-width");
  trace->add_option("--t-points", trace_points, "t grid points");
  trace->add_option("--bip", trace_bip, "analytic | fitted")->check(CLI::IsMember({"analytic", "fitted"}));
  trace_gen.add(trace);
  trace_quad.add(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kParse;
  }

  try {
    if (*certify) {
      const MatrixFile m = read_matrix(certify_in);
      const auto cert = certify_kind == "invertible" ? hk::certify_invertible_sectorial(m.matrix, s_max, scan_points)
                                                     : hk::certify_sectorial(m.matrix, s_min, s_max, scan_points);
      write_json(hk::io::certificate_to_json(cert), out);
    } else if (*power) {
      const MatrixFile m = read_matrix(power_in);
      const hk::Complex z = parse_exponent(exponent);
      const auto& cfg = power_quad.cfg;
      cfg.validate();
      hk::PowerResult r;
      if (z == hk::Complex(0.0, 0.0) && method != "extended") {
        hk::require_square(m.matrix, "power");
        r = hk::oracle_power(m.matrix, z);
      } else if (method == "auto") {
        r = hk::auto_power(m.matrix, z, cfg);
      } else if (method == "oracle") {
        r = hk::oracle_power(m.matrix, z);
      } else if (method == "balakrishnan") {
        if (z.imag() != 0.0 || !(z.real() < 0.0))
          throw hk::Error(hk::Errc::ExponentNotNegative, "balakrishnan needs a real exponent in (-1, 0)");
        r = hk::balakrishnan_neg_power(m.matrix, -z.real(), cfg);
      } else if (method == "dunford") {
        if (!(z.real() < 0.0)) throw hk::Error(hk::Errc::ExponentNotNegative, "dunford needs Re z < 0");
        r = hk::dunford_power(m.matrix, z, hk::certify_invertible_sectorial(m.matrix), cfg);
      } else if (method == "imaginary") {
        if (z.real() != 0.0) throw hk::Error(hk::Errc::InvalidExponent, "imaginary needs Re z = 0");
        r = hk::imaginary_power(m.matrix, z.imag(), cfg);
      } else if (method == "quadrature") {
        r = hk::quadrature_power(m.matrix, z, cfg);
      } else {
        r = hk::extended_power_q(m.matrix, z, q_order, q_k, hk::certify_sectorial(m.matrix), cfg);
      }
      write_json(hk::io::power_to_json(r), out);
    } else if (*bip) {
      const MatrixFile m = read_matrix(bip_in);
      const auto grid = t_range(t_min, t_max, t_points);
      bip_quad.cfg.validate();
      hk::BipCertificate cert;
      const bool analytic = bip_mode == "analytic" || (bip_mode == "auto" && m.structure);
      if (analytic) {
        cert = make_bip(m.matrix, m.structure, "analytic", "the matrix", grid, bip_quad.cfg);
      } else {
        if (phi_points < 1 || phi_max < 0.0) throw Fail{kParse, "empty phi grid"};
        cert = hk::fit_bip(hk::sample_imaginary_norms(m.matrix, grid, bip_quad.cfg),
                           hk::defaults::linspace(0.0, phi_max, phi_points));
      }
      write_json(hk::io::bip_to_json(cert), out);
    } else if (*hkc) {
      const hk::InstanceBundle bundle = load_bundle(hk_in, hk_gen);
      const auto a_grid = a_grid_text.empty() ? hk::defaults::heinz_kato_a_grid() : parse_list(a_grid_text, "a-grid");
      hk_quad.cfg.validate();
      const auto t_grid = hk::defaults::bip_t_grid();
      auto bip_a = make_bip(bundle.a, bundle.structure_a, hk_bip, "A", t_grid, hk_quad.cfg);
      auto bip_b = make_bip(bundle.b, bundle.structure_b, hk_bip, "B", t_grid, hk_quad.cfg);
      const std::string label = hk_gen.active() ? hk_gen.label() : hk_in;
      const auto inst = hk::make_instance(bundle.a, bundle.b, bundle.t, bip_a, bip_b, label);
      const hk::LhsRoute route = lhs_route == "oracle"       ? hk::LhsRoute::Oracle
                                 : lhs_route == "quadrature" ? hk::LhsRoute::Quadrature
                                                             : hk::LhsRoute::Auto;
      const auto report = hk::check_inequality(inst, a_grid, hk_quad.cfg, route);
      write_json(hk::io::report_to_json(report), out);
      if (!report.all_pass) return kViolation;
    } else if (*gen) {
      if (!gen_flags.active()) throw Fail{kParse, "gen needs --gen class=... or --seed"};
      write_json(hk::io::bundle_to_json(hk::gen_instance(gen_flags.spec(), gen_flags.norm_t)), out);
    } else if (*trace) {
      const hk::InstanceBundle bundle = load_bundle(trace_in, trace_gen);
      if (trace_points < hk::defaults::kTraceMinTPoints || !(trace_tmax > 0.0))
        throw Fail{kParse, "t grid needs at least " + std::to_string(hk::defaults::kTraceMinTPoints) +
                               " points and a positive half-width"};
      trace_quad.cfg.validate();
      const auto t_grid = hk::defaults::linspace(-trace_tmax, trace_tmax, trace_points);
      auto bip_a = make_bip(bundle.a, bundle.structure_a, trace_bip, "A", hk::defaults::bip_t_grid(), trace_quad.cfg);
      auto bip_b = make_bip(bundle.b, bundle.structure_b, trace_bip, "B", hk::defaults::bip_t_grid(), trace_quad.cfg);
      const auto inst = hk::make_instance(bundle.a, bundle.b, bundle.t, bip_a, bip_b);
      hk::SplitMix64 rng(uv_seed);
      hk::CVector u(inst.a.rows()), v(inst.b.rows());
      for (auto& x : u) x = rng.complex_normal();
      for (auto& x : v) x = rng.complex_normal();
      const auto tr = hk::three_lines_trace(inst, trace_a, u, v, t_grid, trace_quad.cfg);
      json j = hk::io::trace_to_json(tr);
      j["u"] = hk::io::matrix_to_json(u);
      j["v"] = hk::io::matrix_to_json(v);
      write_json(j, out);
    }
  } catch (const Fail& f) {
    std::cerr << "hk: " << f.message << "\n";
    return f.code;
  } catch (const hk::Error& e) {
    std::cerr << "hk: " << hk::to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "hk: " << e.what() << "\n";
    return kParse;
  }
  return kOk;
}
