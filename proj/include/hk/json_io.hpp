#pragma once

// JSON schemas for matrices, instance bundles, certificates, power results, reports and
// three-lines traces. Doubles are written in shortest round-trip form, so finite values
// re-parse bit-exactly. Parse failures raise Error(Errc::Parse) naming the offending field.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hk/bip.hpp"
#include "hk/cmatrix.hpp"
#include "hk/error.hpp"
#include "hk/gen.hpp"
#include "hk/heinzkato.hpp"
#include "hk/powers.hpp"
#include "hk/sectorial.hpp"

namespace hk::io {

using json = nlohmann::json;

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object()) throw Error(Errc::Parse, "'" + ctx + "' must be an object");
  const auto it = j.find(key);
  if (it == j.end()) throw Error(Errc::Parse, "missing field '" + (ctx.empty() ? key : ctx + "." + key) + "'");
  return *it;
}

inline double number(const json& j, const std::string& name) {
  if (!j.is_number()) throw Error(Errc::Parse, "field '" + name + "' must be a number");
  return j.get<double>();
}

inline std::int64_t integer(const json& j, const std::string& name) {
  if (!j.is_number_integer()) throw Error(Errc::Parse, "field '" + name + "' must be an integer");
  return j.get<std::int64_t>();
}

inline bool boolean(const json& j, const std::string& name) {
  if (!j.is_boolean()) throw Error(Errc::Parse, "field '" + name + "' must be a boolean");
  return j.get<bool>();
}

inline std::string string(const json& j, const std::string& name) {
  if (!j.is_string()) throw Error(Errc::Parse, "field '" + name + "' must be a string");
  return j.get<std::string>();
}

inline double num_field(const json& j, const std::string& key, const std::string& ctx) {
  return number(field(j, key, ctx), ctx.empty() ? key : ctx + "." + key);
}

inline json pair_list(const std::vector<std::pair<double, double>>& v) {
  json arr = json::array();
  for (const auto& [x, y] : v) arr.push_back({x, y});
  return arr;
}

inline std::vector<std::pair<double, double>> pair_list_from(const json& j, const std::string& name) {
  if (!j.is_array()) throw Error(Errc::Parse, "field '" + name + "' must be an array");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string item = name + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) throw Error(Errc::Parse, "field '" + item + "' must be a pair");
    out.emplace_back(number(j[i][0], item + "[0]"), number(j[i][1], item + "[1]"));
  }
  return out;
}

inline json optional_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

// ---------------------------------------------------------------------------
// matrices

inline json matrix_to_json(const CMatrix& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    entries.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline CMatrix matrix_from_json(const json& j, const std::string& ctx = "") {
  using detail::field;
  const std::string pre = ctx.empty() ? "" : ctx + ".";
  const auto rows = detail::integer(field(j, "rows", ctx), pre + "rows");
  const auto cols = detail::integer(field(j, "cols", ctx), pre + "cols");
  if (rows < 1) throw Error(Errc::Parse, "field '" + pre + "rows' must be positive");
  if (cols < 1) throw Error(Errc::Parse, "field '" + pre + "cols' must be positive");
  const json& entries = field(j, "entries", ctx);
  const std::string ename = pre + "entries";
  if (!entries.is_array() || static_cast<std::int64_t>(entries.size()) != rows)
    throw Error(Errc::Parse, "field '" + ename + "' must be an array of " + std::to_string(rows) + " rows");
  CMatrix m(rows, cols);
  for (std::int64_t i = 0; i < rows; ++i) {
    const json& row = entries[static_cast<std::size_t>(i)];
    const std::string rname = ename + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<std::int64_t>(row.size()) != cols)
      throw Error(Errc::Parse, "field '" + rname + "' must hold " + std::to_string(cols) + " entries");
    for (std::int64_t c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      const std::string name = rname + "[" + std::to_string(c) + "]";
      if (!e.is_array() || e.size() != 2) throw Error(Errc::Parse, "field '" + name + "' must be a [re, im] pair");
      const double re = detail::number(e[0], name + "[0]");
      const double im = detail::number(e[1], name + "[1]");
      if (!std::isfinite(re) || !std::isfinite(im)) throw Error(Errc::Parse, "field '" + name + "' is not finite");
      m(i, c) = Complex(re, im);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// structure and bundles

inline json structure_to_json(const OperatorStructure& s) {
  json j{{"class", to_string(s.cls)}, {"dim", s.dim}};
  if (s.cls == InstanceClass::JordanBlock) {
    j["jordan_lambda"] = s.jordan_lambda;
    j["nilpotent_norm"] = s.nilpotent_norm;
  } else {
    j["similarity"] = matrix_to_json(s.similarity);
    j["diagonal"] = std::vector<double>(s.diagonal.data(), s.diagonal.data() + s.diagonal.size());
  }
  return j;
}

inline OperatorStructure structure_from_json(const json& j, const std::string& ctx = "structure") {
  OperatorStructure s;
  s.cls = instance_class_from_string(detail::string(detail::field(j, "class", ctx), ctx + ".class"));
  s.dim = static_cast<int>(detail::integer(detail::field(j, "dim", ctx), ctx + ".dim"));
  if (s.cls == InstanceClass::JordanBlock) {
    s.jordan_lambda = detail::num_field(j, "jordan_lambda", ctx);
    s.nilpotent_norm = detail::num_field(j, "nilpotent_norm", ctx);
  } else {
    s.similarity = matrix_from_json(detail::field(j, "similarity", ctx), ctx + ".similarity");
    const json& d = detail::field(j, "diagonal", ctx);
    if (!d.is_array()) throw Error(Errc::Parse, "field '" + ctx + ".diagonal' must be an array");
    s.diagonal.resize(static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i)
      s.diagonal(static_cast<Eigen::Index>(i)) = detail::number(d[i], ctx + ".diagonal[" + std::to_string(i) + "]");
  }
  return s;
}

inline json spec_to_json(const InstanceSpec& s) {
  return json{{"seed", s.seed},           {"class", to_string(s.cls)},   {"n1", s.n1},
              {"n2", s.n2},               {"lambda_min", s.lambda_min},  {"lambda_max", s.lambda_max},
              {"cond_target", s.cond_target}};
}

inline InstanceSpec spec_from_json(const json& j, const std::string& ctx = "spec") {
  InstanceSpec s;
  const json& seed = detail::field(j, "seed", ctx);
  if (!seed.is_number_unsigned() && !seed.is_number_integer())
    throw Error(Errc::Parse, "field '" + ctx + ".seed' must be an integer");
  s.seed = seed.get<std::uint64_t>();
  s.cls = instance_class_from_string(detail::string(detail::field(j, "class", ctx), ctx + ".class"));
  s.n1 = static_cast<int>(detail::integer(detail::field(j, "n1", ctx), ctx + ".n1"));
  s.n2 = static_cast<int>(detail::integer(detail::field(j, "n2", ctx), ctx + ".n2"));
  s.lambda_min = detail::num_field(j, "lambda_min", ctx);
  s.lambda_max = detail::num_field(j, "lambda_max", ctx);
  s.cond_target = detail::num_field(j, "cond_target", ctx);
  return s;
}

inline json bundle_to_json(const InstanceBundle& b) {
  json j{{"A", matrix_to_json(b.a)}, {"B", matrix_to_json(b.b)}, {"T", matrix_to_json(b.t)}};
  json st = json::object();
  if (b.structure_a) st["A"] = structure_to_json(*b.structure_a);
  if (b.structure_b) st["B"] = structure_to_json(*b.structure_b);
  j["structure"] = st;
  if (b.spec) j["spec"] = spec_to_json(*b.spec);
  return j;
}

inline InstanceBundle bundle_from_json(const json& j) {
  InstanceBundle b;
  b.a = matrix_from_json(detail::field(j, "A", ""), "A");
  b.b = matrix_from_json(detail::field(j, "B", ""), "B");
  b.t = matrix_from_json(detail::field(j, "T", ""), "T");
  if (const auto it = j.find("structure"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw Error(Errc::Parse, "field 'structure' must be an object");
    if (it->contains("A")) b.structure_a = structure_from_json((*it)["A"], "structure.A");
    if (it->contains("B")) b.structure_b = structure_from_json((*it)["B"], "structure.B");
  }
  if (const auto it = j.find("spec"); it != j.end() && !it->is_null()) b.spec = spec_from_json(*it);
  return b;
}

// ---------------------------------------------------------------------------
// certificates

inline SectorialKind sectorial_kind_from_string(const std::string& s) {
  if (s == "InvertibleSectorial") return SectorialKind::InvertibleSectorial;
  if (s == "Sectorial") return SectorialKind::Sectorial;
  throw Error(Errc::Parse, "unknown sectorial kind '" + s + "'");
}

inline json certificate_to_json(const SectorialCertificate& c) {
  std::vector<std::pair<double, double>> scan;
  for (const auto& p : c.scan) scan.emplace_back(p.s, p.value);
  return json{{"kind", to_string(c.kind)}, {"constant", c.constant}, {"angle", c.angle},
              {"radius", c.radius},        {"scan", detail::pair_list(scan)}, {"refined", c.refined}};
}

inline SectorialCertificate certificate_from_json(const json& j, const std::string& ctx = "certificate") {
  SectorialCertificate c;
  c.kind = sectorial_kind_from_string(detail::string(detail::field(j, "kind", ctx), ctx + ".kind"));
  c.constant = detail::num_field(j, "constant", ctx);
  c.angle = detail::num_field(j, "angle", ctx);
  c.radius = detail::num_field(j, "radius", ctx);
  for (const auto& [s, v] : detail::pair_list_from(detail::field(j, "scan", ctx), ctx + ".scan")) c.scan.push_back({s, v});
  c.refined = detail::boolean(detail::field(j, "refined", ctx), ctx + ".refined");
  return c;
}

inline BipProvenance provenance_from_string(const std::string& s) {
  if (s == "AnalyticNormal") return BipProvenance::AnalyticNormal;
  if (s == "AnalyticSimilarity") return BipProvenance::AnalyticSimilarity;
  if (s == "AnalyticJordan") return BipProvenance::AnalyticJordan;
  if (s == "Fitted") return BipProvenance::Fitted;
  throw Error(Errc::Parse, "unknown BIP provenance '" + s + "'");
}

inline json bip_to_json(const BipCertificate& c) {
  std::vector<std::pair<double, double>> samples;
  for (const auto& s : c.samples) samples.emplace_back(s.t, s.norm);
  return json{{"M", c.M},         {"phi", c.phi}, {"provenance", to_string(c.provenance)},
              {"t_max", c.t_max}, {"samples", detail::pair_list(samples)}};
}

inline BipCertificate bip_from_json(const json& j, const std::string& ctx = "bip") {
  BipCertificate c;
  c.M = detail::num_field(j, "M", ctx);
  c.phi = detail::num_field(j, "phi", ctx);
  c.provenance = provenance_from_string(detail::string(detail::field(j, "provenance", ctx), ctx + ".provenance"));
  c.t_max = detail::num_field(j, "t_max", ctx);
  for (const auto& [t, n] : detail::pair_list_from(detail::field(j, "samples", ctx), ctx + ".samples"))
    c.samples.push_back({t, n});
  return c;
}

// ---------------------------------------------------------------------------
// power results

inline PowerMethod power_method_from_string(const std::string& s) {
  for (auto m : {PowerMethod::Oracle, PowerMethod::Balakrishnan, PowerMethod::Dunford,
                 PowerMethod::ImaginaryIntegral, PowerMethod::ExtendedCalculusQ})
    if (to_string(m) == s) return m;
  throw Error(Errc::Parse, "unknown power method '" + s + "'");
}

inline json power_to_json(const PowerResult& p) {
  return json{{"method", to_string(p.method)},
              {"exponent", {p.exponent.real(), p.exponent.imag()}},
              {"error_estimate", p.error_estimate},
              {"tail_bound", p.tail_bound},
              {"evaluations", p.evaluations},
              {"panels", p.panels},
              {"truncation", {p.trunc_lo, p.trunc_hi}},
              {"value", matrix_to_json(p.value)}};
}

inline PowerResult power_from_json(const json& j, const std::string& ctx = "power") {
  PowerResult p;
  p.method = power_method_from_string(detail::string(detail::field(j, "method", ctx), ctx + ".method"));
  const json& z = detail::field(j, "exponent", ctx);
  if (!z.is_array() || z.size() != 2) throw Error(Errc::Parse, "field '" + ctx + ".exponent' must be [re, im]");
  p.exponent = Complex(detail::number(z[0], ctx + ".exponent[0]"), detail::number(z[1], ctx + ".exponent[1]"));
  p.error_estimate = detail::num_field(j, "error_estimate", ctx);
  p.tail_bound = detail::num_field(j, "tail_bound", ctx);
  p.evaluations = static_cast<std::size_t>(detail::integer(detail::field(j, "evaluations", ctx), ctx + ".evaluations"));
  p.panels = static_cast<std::size_t>(detail::integer(detail::field(j, "panels", ctx), ctx + ".panels"));
  const json& tr = detail::field(j, "truncation", ctx);
  if (!tr.is_array() || tr.size() != 2) throw Error(Errc::Parse, "field '" + ctx + ".truncation' must be a pair");
  p.trunc_lo = detail::number(tr[0], ctx + ".truncation[0]");
  p.trunc_hi = detail::number(tr[1], ctx + ".truncation[1]");
  p.value = matrix_from_json(detail::field(j, "value", ctx), ctx + ".value");
  return p;
}

// ---------------------------------------------------------------------------
// reports

inline json report_to_json(const HeinzKatoReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr{{"a", row.a}, {"status", row.status == RowStatus::Ok ? "Ok" : "QuadratureFailed"}};
    if (row.status == RowStatus::Ok) {
      jr["lhs"] = row.lhs;
      jr["lhs_error"] = row.lhs_error;
    } else {
      jr["lhs"] = nullptr;
      jr["lhs_error"] = nullptr;
    }
    jr["bound1"] = detail::optional_number(row.bound1);
    jr["bound2"] = row.bound2;
    jr["bound3"] = row.bound3;
    jr["margins"] = json{{"hilbert", detail::optional_number(row.margin1)}, {"interpolation", row.margin2}, {"three_lines", row.margin3}};
    jr["pass"] = json{{"hilbert", row.pass1 ? json(*row.pass1) : json(nullptr)},
                      {"interpolation", row.pass2},
                      {"three_lines", row.pass3},
                      {"all", row.pass}};
    if (!row.note.empty()) jr["note"] = row.note;
    rows.push_back(std::move(jr));
  }
  json notes = json::array();
  if (r.shifted_a) notes.push_back("A singular to working precision; checked as A + 1e-6 I");
  if (r.shifted_b) notes.push_back("B singular to working precision; checked as B + 1e-6 I");
  if (r.fitted_bip) notes.push_back("fitted BIP certificate: bounds only witnessed on the sampled |t| range");
  return json{{"instance",
               {{"label", r.label},
                {"n1", r.n1},
                {"n2", r.n2},
                {"M", r.m},
                {"normT", r.norm_t},
                {"K_A", r.k_a},
                {"K_B", r.k_b},
                {"shifted_A", r.shifted_a},
                {"shifted_B", r.shifted_b},
                {"hilbert_applicable", r.hilbert_applicable},
                {"lhs_route", r.lhs_route}}},
              {"bip", {{"A", bip_to_json(r.bip_a)}, {"B", bip_to_json(r.bip_b)}}},
              {"fitted_bip", r.fitted_bip},
              {"rows", std::move(rows)},
              {"worst_margin", detail::finite_or_null(r.worst_margin)},
              {"max_ratio_interpolation", r.max_ratio2},
              {"max_ratio_three_lines", r.max_ratio3},
              {"violations", r.violations},
              {"failed_rows", r.failed_rows},
              {"all_pass", r.all_pass},
              {"notes", std::move(notes)}};
}

inline HeinzKatoReport report_from_json(const json& j) {
  using detail::field;
  HeinzKatoReport r;
  const json& inst = field(j, "instance", "");
  r.label = detail::string(field(inst, "label", "instance"), "instance.label");
  r.n1 = static_cast<int>(detail::integer(field(inst, "n1", "instance"), "instance.n1"));
  r.n2 = static_cast<int>(detail::integer(field(inst, "n2", "instance"), "instance.n2"));
  r.m = detail::num_field(inst, "M", "instance");
  r.norm_t = detail::num_field(inst, "normT", "instance");
  r.k_a = detail::num_field(inst, "K_A", "instance");
  r.k_b = detail::num_field(inst, "K_B", "instance");
  r.shifted_a = detail::boolean(field(inst, "shifted_A", "instance"), "instance.shifted_A");
  r.shifted_b = detail::boolean(field(inst, "shifted_B", "instance"), "instance.shifted_B");
  r.hilbert_applicable =
      detail::boolean(field(inst, "hilbert_applicable", "instance"), "instance.hilbert_applicable");
  r.lhs_route = detail::string(field(inst, "lhs_route", "instance"), "instance.lhs_route");
  const json& bip = field(j, "bip", "");
  r.bip_a = bip_from_json(field(bip, "A", "bip"), "bip.A");
  r.bip_b = bip_from_json(field(bip, "B", "bip"), "bip.B");
  r.fitted_bip = detail::boolean(field(j, "fitted_bip", ""), "fitted_bip");
  const json& rows = field(j, "rows", "");
  if (!rows.is_array()) throw Error(Errc::Parse, "field 'rows' must be an array");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& jr = rows[i];
    const std::string ctx = "rows[" + std::to_string(i) + "]";
    HeinzKatoRow row;
    row.a = detail::num_field(jr, "a", ctx);
    const std::string status = detail::string(field(jr, "status", ctx), ctx + ".status");
    row.status = status == "Ok" ? RowStatus::Ok : RowStatus::QuadratureFailed;
    if (row.status == RowStatus::Ok) {
      row.lhs = detail::num_field(jr, "lhs", ctx);
      row.lhs_error = detail::num_field(jr, "lhs_error", ctx);
    }
    if (!field(jr, "bound1", ctx).is_null()) row.bound1 = detail::num_field(jr, "bound1", ctx);
    row.bound2 = detail::num_field(jr, "bound2", ctx);
    row.bound3 = detail::num_field(jr, "bound3", ctx);
    const json& mg = field(jr, "margins", ctx);
    if (!field(mg, "hilbert", ctx + ".margins").is_null()) row.margin1 = detail::num_field(mg, "hilbert", ctx + ".margins");
    row.margin2 = detail::num_field(mg, "interpolation", ctx + ".margins");
    row.margin3 = detail::num_field(mg, "three_lines", ctx + ".margins");
    const json& ps = field(jr, "pass", ctx);
    if (!field(ps, "hilbert", ctx + ".pass").is_null())
      row.pass1 = detail::boolean(field(ps, "hilbert", ctx + ".pass"), ctx + ".pass.hilbert");
    row.pass2 = detail::boolean(field(ps, "interpolation", ctx + ".pass"), ctx + ".pass.interpolation");
    row.pass3 = detail::boolean(field(ps, "three_lines", ctx + ".pass"), ctx + ".pass.three_lines");
    row.pass = detail::boolean(field(ps, "all", ctx + ".pass"), ctx + ".pass.all");
    if (const auto it = jr.find("note"); it != jr.end()) row.note = detail::string(*it, ctx + ".note");
    r.rows.push_back(std::move(row));
  }
  const json& wm = field(j, "worst_margin", "");
  r.worst_margin = wm.is_null() ? std::numeric_limits<double>::infinity() : detail::number(wm, "worst_margin");
  r.max_ratio2 = detail::num_field(j, "max_ratio_interpolation", "");
  r.max_ratio3 = detail::num_field(j, "max_ratio_three_lines", "");
  r.violations = static_cast<int>(detail::integer(field(j, "violations", ""), "violations"));
  r.failed_rows = static_cast<int>(detail::integer(field(j, "failed_rows", ""), "failed_rows"));
  r.all_pass = detail::boolean(field(j, "all_pass", ""), "all_pass");
  return r;
}

inline json trace_to_json(const ThreeLinesTrace& t) {
  json pts = json::array();
  for (const auto& p : t.points) pts.push_back({p.t, p.left, p.right});
  return json{{"a", t.a},
              {"phi", t.phi},
              {"xi", t.xi},
              {"sup_re0", t.sup0},
              {"sup_re1", t.sup1},
              {"t_at_sup_re0", t.t_sup0},
              {"t_at_sup_re1", t.t_sup1},
              {"sup_re0_interior", t.sup0_interior},
              {"sup_re1_interior", t.sup1_interior},
              {"center", t.center},
              {"bound", t.bound},
              {"holds", t.holds},
              {"points", std::move(pts)}};
}

}  // namespace hk::io
