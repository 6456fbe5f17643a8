#include "crf/verifier.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <set>

#include "crf/errors.hpp"
#include "crf/format.hpp"

namespace crf {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

bool ResidualReport::passed() const { return count(Verdict::fail) == 0 && count(Verdict::pass) > 0; }

std::size_t ResidualReport::count(Verdict v) const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const ResidualRow& r) { return r.verdict == v; }));
}

double ResidualReport::max_residual(const std::string& identity) const {
  double m = 0.0;
  for (const auto& r : rows)
    if (r.verdict != Verdict::skipped && (identity.empty() || r.identity == identity)) m = std::max(m, r.residual);
  return m;
}

double ResidualReport::max_relative(const std::string& identity) const {
  double m = 0.0;
  for (const auto& r : rows)
    if (r.verdict != Verdict::skipped && (identity.empty() || r.identity == identity)) m = std::max(m, r.residual / r.scale);
  return m;
}

std::vector<std::string> ResidualReport::identities() const {
  std::vector<std::string> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), r.identity) == out.end()) out.push_back(r.identity);
  return out;
}

namespace {

const Complex I(0.0, 1.0);

double block_max(const Jet& a, int d) {
  const auto& sp = a.space();
  double m = 0.0;
  for (std::size_t k = sp.block_begin(d); k < sp.size_upto(d); ++k) m = std::max(m, std::abs(a[k]));
  return m;
}

// Rows for one identity at one t-order: `residuals` are the components
// (matrix entries etc.), `terms` the pieces that were added up.
void add_rows(ResidualReport& rep, const std::string& id, int order, const std::vector<Jet>& residuals,
              const std::vector<Jet>& terms) {
  int valid = residuals.empty() ? -1 : residuals.front().valid_degree();
  for (const auto& r : residuals) valid = std::min(valid, r.valid_degree());
  if (valid < 0) {
    rep.rows.push_back({id, order, -1, 0.0, 1.0, rep.tolerance, Verdict::skipped, "no valid spatial degree"});
    return;
  }
  double scale = 1.0;
  for (const auto& t : terms)
    if (!t.is_exhausted()) scale = std::max(scale, max_abs(t, std::min(valid, t.valid_degree())));
  for (int d = 0; d <= valid; ++d) {
    double res = 0.0;
    for (const auto& r : residuals) res = std::max(res, block_max(r, d));
    rep.rows.push_back({id, order, d, res, scale, rep.tolerance, res <= rep.tolerance * scale ? Verdict::pass : Verdict::fail, {}});
  }
}

void add_skip(ResidualReport& rep, const std::string& id, const std::string& why) {
  rep.rows.push_back({id, 0, -1, 0.0, 1.0, rep.tolerance, Verdict::skipped, why});
}

JetMatrix hessian_or_exhausted(const Jet& f) {
  if (f.valid_degree() >= 2) return complex_mixed_hessian(f);
  return JetMatrix(f.n(), Jet::exhausted(f.n(), f.max_degree()));
}

TJetMatrix hessian(const TJet& f) {
  const int n = f.n();
  TJetMatrix out(n, TJet(n, f.max_degree(), f.order()));
  for (int m = 0; m <= f.order(); ++m) {
    const JetMatrix h = hessian_or_exhausted(f[m]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j)[m] = h(i, j);
  }
  return out;
}

TJetMatrix t_derive(const TJetMatrix& g) {
  return map_entries(g, [](const TJet& e) { return crf::t_derive(e); });
}

Jet constant_jet(const Solution& s, Complex value) { return Jet::constant(s.input.n, s.config.D, value); }

Jet zero_jet(const Solution& s) { return Jet(s.input.n, s.config.D); }

}  // namespace

ResidualReport residual_system(const Solution& s, double tol) {
  ResidualReport rep;
  rep.name = "system";
  rep.tolerance = tol;
  const int n = s.input.n;
  const int M = s.config.M;
  const double c = s.config.c;

  for (int k = 0; k < M; ++k) {
    const JetMatrix H = hessian_or_exhausted(s.v[k]);
    std::vector<Jet> res, terms;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Jet cg = (c * (k + 1)) * s.g(i, j)[k + 1];
        res.push_back(H(i, j) + cg);
        terms.push_back(H(i, j));
        terms.push_back(cg);
      }
    add_rows(rep, "pp", k, res, terms);
  }

  const TJet det_g = jet_det(s.g);
  const TJet d_exp_u = crf::t_derive(s.exp_u);
  for (int k = 0; k < M; ++k) {
    const Jet cdet = c * det_g[k];
    add_rows(rep, "toda2", k, {d_exp_u[k] - cdet}, {d_exp_u[k], cdet});
  }

  const TJet wdet = s.w_inv * det_g;
  for (int k = 0; k <= M; ++k) add_rows(rep, "u_relation", k, {wdet[k] - s.exp_u[k]}, {wdet[k], s.exp_u[k]});

  TJet one_plus_tvt = t_shift_up(crf::t_derive(s.v));
  one_plus_tvt[0] += constant_jet(s, 1.0);
  const TJet cw = t_shift_down(s.w_inv) * one_plus_tvt;
  for (int k = 0; k < M; ++k) {
    const Jet target = k == 0 ? constant_jet(s, c) : zero_jet(s);
    add_rows(rep, "cw", k, {cw[k] - target}, {cw[k], target});
  }
  return rep;
}

ResidualReport residual_consequence(const Solution& s, double tol) {
  ResidualReport rep;
  rep.name = "consequence";
  rep.tolerance = tol;
  const int M = s.config.M;
  if (M < 3) {
    add_skip(rep, "new", "needs M >= 3");
    return rep;
  }
  // The 1/(c t) part of w is spatially constant and drops out of the Hessian.
  const TJetMatrix Hw = hessian((1.0 / s.config.c) * crf::t_derive(s.v));
  const TJetMatrix gtt = t_derive(t_derive(s.g));
  for (int k = 0; k <= M - 2; ++k) {
    std::vector<Jet> res, terms;
    for (std::size_t e = 0; e < Hw.entries().size(); ++e) {
      const Jet& a = Hw.entries()[e][k];
      const Jet& b = gtt.entries()[e][k];
      res.push_back(a + b);
      terms.push_back(a);
      terms.push_back(b);
    }
    add_rows(rep, "new", k, res, terms);
  }
  return rep;
}

ResidualReport laplacian_moment(const Solution& s, double tol) {
  ResidualReport rep;
  rep.name = "laplacian";
  rep.tolerance = tol;
  const int n = s.input.n;
  const int M = s.config.M;
  const TJetMatrix dg = t_derive(s.g);
  const TJetMatrix adj = adjugate(s.g);
  const TJet det_g = jet_det(s.g);
  if (det_g[0].constant_term() == Complex{}) throw DegeneracyError("laplacian_moment: det g vanishes at the base point");
  TJet trace(n, s.config.D, M - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) trace += adj(j, i) * dg(i, j);
  trace = trace * reciprocal(det_g);
  const TJet first = s.w_inv * trace;
  const TJet second = crf::t_derive(s.w_inv);
  for (int k = 0; k < M; ++k) {
    const Jet target = k == 0 ? constant_jet(s, s.config.c) : zero_jet(s);
    add_rows(rep, "laplacian_t", k, {first[k] + second[k] - target}, {first[k], second[k], target});
  }
  return rep;
}

ClassIntegral class_integral(const Solution& s) {
  ClassIntegral out;
  const auto& src = s.input.source;
  if (s.input.n != 1 || !src || (src->name != "flat" && src->name != "fubini_study_chart")) {
    out.reason = "class integral is implemented for the one-dimensional charts flat:1 and fubini_study_chart:1";
    return out;
  }
  out.supported = true;
  SolverConfig local;
  local.c = s.config.c;
  local.M = 1;
  local.D = 2;
  // F restricted to t = 0 is -g^(1) dx dy for n = 1; g^(1) is recomputed
  // from a solve re-centred at each node.
  const auto density = [&](double x, double y) {
    const Solution loc = solve(builtin_metric(*src, local.D, {x, y}), local);
    ++out.nodes;
    return -loc.g(0, 0)[1].constant_term().real();
  };
  constexpr int theta_points = 16;
  const double pi = std::numbers::pi;
  const auto ring = [&](double r) {
    double sum = 0.0;
    for (int k = 0; k < theta_points; ++k) {
      const double th = 2.0 * pi * k / theta_points;
      sum += density(r * std::cos(th), r * std::sin(th));
    }
    return sum * (2.0 * pi / theta_points);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err_in = 0.0, err_out = 0.0;
  const double inner = GK::integrate([&](double r) { return ring(r) * r; }, 0.0, 1.0, 10, 1e-12, &err_in);
  double outer = 0.0;
  if (src->name == "fubini_study_chart") {
    // |z| > 1 is the unit disc of the chart w = 1/z, in which the metric
    // has the same expression.
    outer = GK::integrate([&](double r) { return ring(r) * r; }, 0.0, 1.0, 10, 1e-12, &err_out);
  } else {
    // r = 1/s on the exterior of the unit disc of the plane
    outer = GK::integrate([&](double s) { return ring(1.0 / s) / (s * s * s); }, 0.0, 1.0, 10, 1e-12, &err_out);
  }
  out.integral = inner + outer;
  out.error_estimate = err_in + err_out;
  out.value = out.integral / (4.0 * pi);
  out.nearest_integer = std::round(out.value);
  out.deviation = std::abs(out.value - out.nearest_integer);
  return out;
}

CurvatureReport curvature_and_class(const Solution& s, double tol) {
  CurvatureReport out;
  ResidualReport& rep = out.residuals;
  rep.name = "curvature";
  rep.tolerance = tol;
  const int n = s.input.n;
  const double c = s.config.c;

  // F = A_ij dz_i ^ dzbar_j + B_i dt ^ dz_i + Bbar_j dt ^ dzbar_j
  const TJetMatrix A = map_entries(t_derive(s.g), [&](const TJet& e) { return (-0.5 * I) * e; });
  const TJet vt = crf::t_derive(s.v);
  std::vector<TJet> B, Bbar;
  for (int i = 0; i < n; ++i) {
    B.push_back((-I / c) * dz(vt, i));
    Bbar.push_back((I / c) * dzbar(vt, i));
  }

  const auto series_rows = [&](const std::string& id, const std::vector<TJet>& res, const std::vector<TJet>& terms) {
    if (res.empty()) return;
    int order = res.front().order();
    for (const auto& r : res) order = std::min(order, r.order());
    for (int k = 0; k <= order; ++k) {
      std::vector<Jet> rk, tk;
      for (const auto& r : res) rk.push_back(r[k]);
      for (const auto& t : terms) tk.push_back(t[k]);
      add_rows(rep, id, k, rk, tk);
    }
  };

  {  // dz ^ dz ^ dzbar
    std::vector<TJet> res, terms;
    for (int k = 0; k < n; ++k)
      for (int i = k + 1; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const TJet a = dz(A(i, j), k), b = dz(A(k, j), i);
          res.push_back(a - b);
          terms.push_back(a);
          terms.push_back(b);
        }
    if (res.empty()) add_skip(rep, "dF_dz_dz_dzbar", "no component for n = 1");
    series_rows("dF_dz_dz_dzbar", res, terms);
  }
  {  // dzbar ^ dz ^ dzbar
    std::vector<TJet> res, terms;
    for (int k = 0; k < n; ++k)
      for (int j = k + 1; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const TJet a = dzbar(A(i, j), k), b = dzbar(A(i, k), j);
          res.push_back(a - b);
          terms.push_back(a);
          terms.push_back(b);
        }
    if (res.empty()) add_skip(rep, "dF_dzbar_dz_dzbar", "no component for n = 1");
    series_rows("dF_dzbar_dz_dzbar", res, terms);
  }
  {  // dt ^ dz ^ dzbar: -(i/2)(g_tt + 4 w_{z zbar})
    std::vector<TJet> res, terms;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const TJet a = crf::t_derive(A(i, j)), b = dzbar(B[static_cast<std::size_t>(i)], j),
                   d = dz(Bbar[static_cast<std::size_t>(j)], i);
        res.push_back(a + b - d);
        terms.push_back(a);
        terms.push_back(b);
        terms.push_back(d);
      }
    series_rows("dF_dt_dz_dzbar", res, terms);
  }
  {  // dt ^ dz ^ dz and dt ^ dzbar ^ dzbar
    std::vector<TJet> res, terms, resb, termsb;
    for (int k = 0; k < n; ++k)
      for (int i = k + 1; i < n; ++i) {
        const TJet a = dz(B[static_cast<std::size_t>(i)], k), b = dz(B[static_cast<std::size_t>(k)], i);
        res.push_back(a - b);
        terms.push_back(a);
        terms.push_back(b);
        const TJet ab = dzbar(Bbar[static_cast<std::size_t>(i)], k), bb = dzbar(Bbar[static_cast<std::size_t>(k)], i);
        resb.push_back(ab - bb);
        termsb.push_back(ab);
        termsb.push_back(bb);
      }
    if (res.empty()) {
      add_skip(rep, "dF_dt_dz_dz", "no component for n = 1");
      add_skip(rep, "dF_dt_dzbar_dzbar", "no component for n = 1");
    }
    series_rows("dF_dt_dz_dz", res, terms);
    series_rows("dF_dt_dzbar_dzbar", resb, termsb);
  }
  {  // F is real
    std::vector<TJet> res, terms;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        res.push_back(A(i, j) + conj(A(j, i)));
        terms.push_back(A(i, j));
      }
    series_rows("real_dz_dzbar", res, terms);
    std::vector<TJet> resb, termsb;
    for (int i = 0; i < n; ++i) {
      resb.push_back(Bbar[static_cast<std::size_t>(i)] - conj(B[static_cast<std::size_t>(i)]));
      termsb.push_back(B[static_cast<std::size_t>(i)]);
    }
    series_rows("real_dt_dz", resb, termsb);
  }

  out.class_integral = class_integral(s);
  const auto& ci = out.class_integral;
  if (!ci.supported) {
    add_skip(rep, "class_integral", ci.reason);
  } else if (s.config.c != 1.0) {
    add_skip(rep, "class_integral", "integrality applies only to the smooth case c = 1");
  } else {
    constexpr double quad_tol = 1e-3;
    rep.rows.push_back({"class_integral", 0, -1, ci.deviation, 1.0, quad_tol, ci.deviation <= quad_tol ? Verdict::pass : Verdict::fail,
                        "value " + format_double(ci.value) + " over " + std::to_string(ci.nodes) + " nodes"});
  }
  return out;
}

SmoothnessReport smoothness_check(const Solution& s, double tol) {
  SmoothnessReport out;
  ResidualReport& rep = out.checks;
  rep.name = "smoothness";
  rep.tolerance = tol;
  const double c = s.config.c;
  const Jet cdet = c * jet_det(s.input.h);
  out.a = s.exp_u[1].constant_term().real();
  out.a_expected = cdet.constant_term().real();
  out.leading_w_inv = s.w_inv[1].constant_term().real();
  out.cone_angle = 2.0 * std::numbers::pi * out.leading_w_inv;
  out.smooth = std::abs(out.leading_w_inv - 1.0) <= tol;

  add_rows(rep, "exp_u_order0", 0, {s.exp_u[0]}, {});
  add_rows(rep, "exp_u_leading", 1, {s.exp_u[1] - cdet}, {s.exp_u[1], cdet});
  add_rows(rep, "w_inv_order0", 0, {s.w_inv[0]}, {});
  const Jet cj = constant_jet(s, c);
  add_rows(rep, "w_inv_leading", 1, {s.w_inv[1] - cj}, {s.w_inv[1], cj});
  if (out.a == 0.0) rep.rows.push_back({"a_nonzero", 1, -1, 0.0, 1.0, tol, Verdict::fail, "leading coefficient of e^u vanishes"});
  rep.notes.push_back(std::string("fibre metric ") + (out.smooth ? "extends smoothly" : "has a cone singularity") +
                      " at t = 0 (cone angle " + format_double(out.cone_angle) + ")");
  return out;
}

Perturbation parse_perturbation(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InvalidInput("--perturb expects FIELD:ORDER:DELTA, got '" + text + "'");
  Perturbation p;
  p.field = parts[0];
  if (p.field != "v" && p.field != "g" && p.field != "w_inv") throw InvalidInput("perturbation field must be v, g or w_inv");
  const double order = parse_double(parts[1], "perturbation order");
  if (order < 0 || order != std::floor(order)) throw InvalidInput("perturbation order must be a nonnegative integer");
  p.order = static_cast<int>(order);
  p.delta = parse_double(parts[2], "perturbation size");
  return p;
}

Solution perturb_solution(const Solution& s, const Perturbation& p) {
  Solution out = s;
  const int n = s.input.n;
  if (p.order > s.config.M) throw InvalidInput("perturbation order exceeds M");
  Jet bump = constant_jet(s, 1.0);
  for (int k = 0; k < n; ++k) bump += Jet::z(n, s.config.D, k) * Jet::zbar(n, s.config.D, k);
  bump *= p.delta;
  const auto apply = [&](Jet& target) {
    if (target.is_exhausted()) throw InvalidInput("perturbation targets an exhausted coefficient");
    target += bump;
  };
  if (p.field == "v") {
    apply(out.v[p.order]);
  } else if (p.field == "w_inv") {
    apply(out.w_inv[p.order]);
  } else {
    for (int i = 0; i < n; ++i) apply(out.g(i, i)[p.order]);
  }
  out.warnings.push_back("perturbed " + p.field + " at order " + std::to_string(p.order) + " by " + format_double(p.delta));
  return out;
}

}  // namespace crf
