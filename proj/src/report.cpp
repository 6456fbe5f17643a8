#include "crf/report.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crf/errors.hpp"
#include "crf/format.hpp"

namespace crf {

namespace {

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

// Non-finite doubles would serialize as null; keep them readable instead.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string exponents_string(const Exponents& e, int nvars) {
  std::string s;
  for (int k = 0; k < nvars; ++k) {
    if (k) s += ':';
    s += std::to_string(e[static_cast<std::size_t>(k)]);
  }
  return s;
}

void append_jet_rows(std::string& out, const Jet& f, int order, const std::string& entry) {
  if (f.empty() || f.is_exhausted()) return;
  const MonomialSpace& sp = f.space();
  const std::size_t end = sp.size_upto(f.valid_degree());
  for (std::size_t i = 0; i < end; ++i) {
    const Complex z = f[i];
    if (z == Complex{}) continue;
    out += std::to_string(order) + ',' + entry + ',' + std::to_string(sp.degree(i)) + ',' +
           exponents_string(sp.exponents(i), f.nvars()) + ',' + format_double(z.real()) + ',' + format_double(z.imag()) +
           '\n';
  }
}

Json valid_degrees(const TJet& f) { return f.valid_degrees(); }

Json base_values(const TJet& f) {
  Json a = Json::array();
  for (const Jet& c : f.coeffs()) a.push_back(c.is_exhausted() ? Json(nullptr) : complex_json(c.constant_term()));
  return a;
}

std::string verdict_of(bool pass) { return pass ? "pass" : "fail"; }

}  // namespace

void ReportBundle::add(std::string name, std::string content) {
  files.push_back({std::move(name), std::move(content)});
}

const ReportFile* ReportBundle::find(const std::string& name) const {
  for (const auto& f : files)
    if (f.name == name) return &f;
  return nullptr;
}

void ReportBundle::write(const std::string& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory '" + dir + "': " + ec.message());
  for (const auto& f : files) {
    const auto path = std::filesystem::path(dir) / f.name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << f.content;
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  }
}

Json conventions_json() {
  Json j;
  j["coordinates"] = "real variables x1,y1,...,xn,yn; z_k = x_k + i y_k";
  j["d_dz"] = "(d/dx - i d/dy)/2";
  j["d_dzbar"] = "(d/dx + i d/dy)/2";
  j["complex_mixed_hessian"] = "4 d^2 f/dz_i dzbar_j (diagonal = coordinate Laplacian)";
  j["metric_evolution"] = "4 (d dbar u)_ij + c (g_ij)_t = 0";
  j["ricci_form"] = "-d^2 log det g/dz_i dzbar_j";
  j["unknowns"] = "u = log t + v, e^u = t e^v, w^{-1} = c t/(1 + t v_t)";
  j["spatial_order"] = "graded-lex, larger powers of earlier variables first";
  j["t_order"] = "ascending";
  j["residual_pass_rule"] = "residual <= tolerance * max(1, largest term coefficient at that order)";
  j["class_integral"] = "int F/(4 pi) over both affine charts of CP^1 (fiber angle period 4 pi)";
  j["majorant_operator"] = "L_ij = -(4/c) d_zi d_zbarj; M_const = 4/|c| (entry sum in real coordinates)";
  j["majorant_status"] = "empirical validation on sampled polydiscs, not a proof";
  return j;
}

Json config_json(const Scenario& sc, const std::string& command) {
  Json j;
  j["command"] = command;
  j["scenario"] = sc.name;
  j["metric"] = sc.metric_label();
  if (!sc.metric) {
    Json e = Json::object();
    for (std::size_t i = 0; i < sc.inline_entries.size(); ++i)
      for (std::size_t j2 = 0; j2 < sc.inline_entries[i].size(); ++j2)
        if (!sc.inline_entries[i][j2].empty())
          e["h" + std::to_string(i + 1) + std::to_string(j2 + 1)] = sc.inline_entries[i][j2];
    j["inline_entries"] = e;
    j["inline_radius"] = sc.inline_radius;
  }
  j["base_point"] = sc.base_point;
  j["seed"] = sc.seed ? Json(*sc.seed) : Json(nullptr);
  j["c"] = sc.solver.c;
  j["M"] = sc.solver.M;
  j["D"] = sc.solver.D;
  j["strict_validity"] = sc.solver.strict_validity;
  j["tolerance"] = sc.tolerance;
  j["R"] = sc.R;
  j["m_max"] = sc.m_max < 0 ? sc.solver.M : sc.m_max;
  j["checks"] = {{"system", sc.checks.system},
                 {"consequence", sc.checks.consequence},
                 {"laplacian", sc.checks.laplacian},
                 {"curvature", sc.checks.curvature},
                 {"smoothness", sc.checks.smoothness}};
  Json p = Json::array();
  for (const auto& q : sc.perturbations) p.push_back({{"field", q.field}, {"order", q.order}, {"delta", q.delta}});
  j["perturbations"] = p;
  return j;
}

Json to_json(const InitialData& d) {
  Json j;
  j["n"] = d.n;
  j["description"] = d.description;
  j["source"] = d.source ? Json(d.source->to_string()) : Json(nullptr);
  j["base_point"] = d.base_point;
  j["polydisc_radius"] = d.polydisc_radius;
  Json h = Json::array();
  for (const auto& z : value_at_base(d.h)) h.push_back(complex_json(z));
  j["h_at_base"] = h;
  return j;
}

Json to_json(const Solution& s) {
  Json j;
  j["n"] = s.input.n;
  j["orders"] = s.config.M;
  j["valid_degrees"] = {{"v", valid_degrees(s.v)},
                        {"g", valid_degrees(s.g(0, 0))},
                        {"exp_u", valid_degrees(s.exp_u)},
                        {"w_inv", valid_degrees(s.w_inv)}};
  Json base;
  base["v"] = base_values(s.v);
  Json g = Json::object();
  for (int a = 0; a < s.input.n; ++a)
    for (int b = a; b < s.input.n; ++b) g["g" + std::to_string(a + 1) + std::to_string(b + 1)] = base_values(s.g(a, b));
  base["g"] = g;
  base["exp_u"] = base_values(s.exp_u);
  base["w_inv"] = base_values(s.w_inv);
  j["at_base_point"] = base;
  j["w_inv_crosscheck"] = number(s.w_inv_crosscheck);
  j["coefficient_files"] = {"v.csv", "g.csv", "exp_u.csv", "w_inv.csv"};
  return j;
}

Json to_json(const ResidualReport& r) {
  Json j;
  j["name"] = r.name;
  j["tolerance"] = r.tolerance;
  j["verdict"] = verdict_of(r.passed());
  j["counts"] = {{"pass", r.count(Verdict::pass)}, {"fail", r.count(Verdict::fail)}, {"skipped", r.count(Verdict::skipped)}};
  Json ids = Json::array();
  for (const auto& id : r.identities()) {
    std::size_t pass = 0, fail = 0, skipped = 0;
    for (const auto& row : r.rows) {
      if (row.identity != id) continue;
      (row.verdict == Verdict::pass ? pass : row.verdict == Verdict::fail ? fail : skipped)++;
    }
    Json e;
    e["identity"] = id;
    e["verdict"] = fail ? "fail" : pass ? "pass" : "skipped";
    e["max_residual"] = number(r.max_residual(id));
    e["max_relative"] = number(r.max_relative(id));
    e["rows"] = {{"pass", pass}, {"fail", fail}, {"skipped", skipped}};
    ids.push_back(e);
  }
  j["identities"] = ids;
  Json fails = Json::array();
  for (const auto& row : r.rows) {
    if (row.verdict != Verdict::fail) continue;
    if (fails.size() == 20) break;
    fails.push_back({{"identity", row.identity},
                     {"t_order", row.order},
                     {"degree", row.degree},
                     {"residual", number(row.residual)},
                     {"scale", number(row.scale)},
                     {"note", row.note}});
  }
  j["first_failures"] = fails;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const ClassIntegral& c) {
  Json j;
  j["supported"] = c.supported;
  if (!c.supported) {
    j["reason"] = c.reason;
    return j;
  }
  j["integral"] = number(c.integral);
  j["value"] = number(c.value);
  j["nearest_integer"] = c.nearest_integer;
  j["deviation"] = number(c.deviation);
  j["nodes"] = c.nodes;
  j["error_estimate"] = number(c.error_estimate);
  return j;
}

Json to_json(const CurvatureReport& r) {
  Json j = to_json(r.residuals);
  j["class_integral"] = to_json(r.class_integral);
  return j;
}

Json to_json(const SmoothnessReport& r) {
  Json j = to_json(r.checks);
  j["a"] = number(r.a);
  j["a_expected"] = number(r.a_expected);
  j["leading_w_inv"] = number(r.leading_w_inv);
  j["cone_angle"] = number(r.cone_angle);
  j["smooth"] = r.smooth;
  return j;
}

Json to_json(const MajorantReport& r) {
  Json j;
  j["status"] = "empirical validation on sampled polydiscs, not a proof";
  j["verdict"] = verdict_of(r.passed());
  const auto& p = r.params;
  j["params"] = {{"R", p.R},
                 {"A", number(p.A)},
                 {"A_sampled", number(p.A_sampled)},
                 {"A_floor", p.A_floor},
                 {"sigma", p.sigma},
                 {"M_const", number(p.M_const)},
                 {"e", p.euler_e},
                 {"sample_points", p.sample_points},
                 {"operator_convention", p.operator_convention}};
  j["nonlinearity_terms"] = r.bounds.terms.size();
  Json C = Json::array();
  for (double v : r.C) C.push_back(number(v));
  j["C"] = C;
  j["C1_equals_A"] = r.C1_equals_A;
  j["check_radii"] = r.check_radii;
  std::size_t pass = 0, fail = 0, skipped = 0;
  double worst = 0.0;
  for (const auto& row : r.rows) {
    if (row.skipped) {
      ++skipped;
      continue;
    }
    (row.pass ? pass : fail)++;
    if (row.rhs > 0) worst = std::max(worst, row.lhs / row.rhs);
  }
  j["domination"] = {{"verdict", verdict_of(r.domination_passed())},
                     {"pass", pass},
                     {"fail", fail},
                     {"skipped", skipped},
                     {"worst_ratio", number(worst)}};
  j["cauchy_check"] = {{"R", r.cauchy.R}, {"verdict", verdict_of(r.cauchy.passed())}, {"rows", r.cauchy.rows.size()}};
  j["radius_estimate"] = {{"radius", r.radius.radius ? number(*r.radius.radius) : Json("entire")},
                          {"heuristic", true},
                          {"note", r.radius.note}};
  return j;
}

Json to_json(const RicciSpectrum& s) { return {{"n", s.n}, {"eigenvalues", s.eigenvalues}}; }

Json to_json(const Polynomial& p) { return p.c; }

Json to_json(const CalibrationReport& r) {
  Json j;
  j["spectrum"] = to_json(r.spectrum);
  j["P"] = to_json(r.P);
  j["w_inv_closed"] = {{"num", to_json(r.w_closed.num)}, {"den", to_json(r.w_closed.den)}};
  j["kappa"] = r.kappa ? Json(*r.kappa) : Json(nullptr);
  j["kappa_unique"] = r.kappa_unique;
  j["max_deviation"] = number(r.max_deviation);
  j["det_deviation"] = number(r.det_deviation);
  j["tolerance"] = r.tolerance;
  Json c = Json::array();
  for (const auto& k : r.candidates)
    c.push_back({{"kappa", k.kappa},
                 {"g_deviation", number(k.g_deviation)},
                 {"w_deviation", number(k.w_deviation)},
                 {"matched", k.matched}});
  j["candidates"] = c;
  return j;
}

std::string coefficients_csv(const TJet& f, const std::string& entry) {
  std::string out = "t_order,entry,degree,exponents,re,im\n";
  for (int m = 0; m <= f.order(); ++m) append_jet_rows(out, f[m], m, entry);
  return out;
}

std::string coefficients_csv(const TJetMatrix& g, const std::string& entry_prefix) {
  std::string out = "t_order,entry,degree,exponents,re,im\n";
  const int order = g(0, 0).order();
  for (int m = 0; m <= order; ++m)
    for (int a = 0; a < g.n(); ++a)
      for (int b = a; b < g.n(); ++b)
        append_jet_rows(out, g(a, b)[m], m, entry_prefix + std::to_string(a + 1) + std::to_string(b + 1));
  return out;
}

std::string residuals_csv(const std::vector<const ResidualReport*>& reports) {
  std::string out = "check,identity,t_order,degree,residual,scale,tolerance,verdict\n";
  for (const auto* r : reports)
    for (const auto& row : r->rows)
      out += r->name + ',' + row.identity + ',' + std::to_string(row.order) + ',' + std::to_string(row.degree) + ',' +
             format_double(row.residual) + ',' + format_double(row.scale) + ',' + format_double(row.tolerance) + ',' +
             to_string(row.verdict) + '\n';
  return out;
}

std::string closed_form_csv(const Polynomial& P, const RationalT& w, int order) {
  std::string out = "quantity,k,value\n";
  const auto rows = [&out](const char* name, const std::vector<double>& c) {
    for (std::size_t k = 0; k < c.size(); ++k) out += std::string(name) + ',' + std::to_string(k) + ',' + format_double(c[k]) + '\n';
  };
  rows("P", P.c);
  rows("w_inv_num", w.num.c);
  rows("w_inv_den", w.den.c);
  rows("w_inv_series", w.series(order));
  return out;
}

std::string calibration_csv(const CalibrationReport& r) {
  std::string out = "kappa,g_deviation,w_deviation,matched\n";
  for (const auto& k : r.candidates)
    out += format_double(k.kappa) + ',' + format_double(k.g_deviation) + ',' + format_double(k.w_deviation) + ',' +
           (k.matched ? "true" : "false") + '\n';
  return out;
}

std::string majorant_sequence_csv(const MajorantReport& r) {
  std::string out = "m,C_m\n";
  for (std::size_t m = 0; m < r.C.size(); ++m) out += std::to_string(m + 1) + ',' + format_double(r.C[m]) + '\n';
  return out;
}

std::string majorant_checks_csv(const MajorantReport& r) {
  std::string out = "m,r,inequality,lhs,rhs,points,verdict\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.m) + ',' + format_double(row.r) + ',' + row.inequality + ',' + format_double(row.lhs) + ',' +
           format_double(row.rhs) + ',' + std::to_string(row.points) + ',' +
           (row.skipped ? "skipped" : verdict_of(row.pass)) + '\n';
  return out;
}

std::string nonlinearity_terms_csv(const MajorantReport& r) {
  std::string out = "p,q,s,alpha,beta,weight,bound\n";
  for (const auto& t : r.bounds.terms) {
    std::string beta;
    for (std::size_t k = 0; k < t.beta.size(); ++k) beta += (k ? ":" : "") + std::to_string(t.beta[k]);
    out += std::to_string(t.p) + ',' + std::to_string(t.q) + ',' + std::to_string(t.s) + ',' + std::to_string(t.alpha) +
           ',' + beta + ',' + std::to_string(t.weight()) + ',' + format_double(t.bound) + '\n';
  }
  return out;
}

std::string cauchy_check_csv(const MajorantReport& r) {
  std::string out = "p,C,r,hypothesis_lhs,hypothesis_rhs,lhs,rhs,points,verdict\n";
  for (const auto& row : r.cauchy.rows)
    out += std::to_string(row.p) + ',' + format_double(row.C) + ',' + format_double(row.r) + ',' +
           format_double(row.hypothesis_lhs) + ',' + format_double(row.hypothesis_rhs) + ',' + format_double(row.lhs) +
           ',' + format_double(row.rhs) + ',' + std::to_string(row.points) + ',' + verdict_of(row.pass) + '\n';
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace crf
