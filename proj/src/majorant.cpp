#include "crf/majorant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "crf/errors.hpp"

namespace crf {

int NonlinearityTerm::beta_total() const {
  int b = 0;
  for (int x : beta) b += x;
  return b;
}

int NonlinearityTerm::weight() const { return p + q + s + alpha + 2 * beta_total(); }

bool CauchyCheckReport::passed() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const CauchyCheckRow& r) { return r.pass; });
}

bool MajorantReport::domination_passed() const {
  bool any = false;
  for (const auto& r : rows) {
    if (r.skipped) continue;
    if (!r.pass) return false;
    any = true;
  }
  return any;
}

bool MajorantReport::passed() const {
  const bool nonneg = std::all_of(C.begin(), C.end(), [](double c) { return c >= 0.0; });
  return domination_passed() && cauchy.passed() && C1_equals_A && nonneg;
}

std::vector<std::vector<Complex>> polydisc_samples(int nvars, double r, int count) {
  static constexpr double primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::vector<Complex>> pts;
  for (int j = 0; j < count; ++j) {
    std::vector<Complex> z(static_cast<std::size_t>(nvars));
    for (int k = 0; k < nvars; ++k) {
      const double gamma = std::sqrt(primes[k]) - std::floor(std::sqrt(primes[k]));
      const double frac = (j + 1) * gamma - std::floor((j + 1) * gamma);
      z[static_cast<std::size_t>(k)] = std::polar(r, two_pi * frac);
    }
    pts.push_back(std::move(z));
  }
  for (unsigned mask = 0; mask < (1u << nvars); ++mask) {
    std::vector<Complex> z(static_cast<std::size_t>(nvars));
    for (int k = 0; k < nvars; ++k) z[static_cast<std::size_t>(k)] = (mask >> k) & 1u ? -r : r;
    pts.push_back(std::move(z));
  }
  return pts;
}

namespace {

constexpr int kCheckPoints = 100;

std::vector<double> default_radii(double R) { return {R / 4, R / 2, 3 * R / 4}; }

struct FirstOrderJets {
  std::vector<Jet> d;  // real partials
  std::vector<Jet> L;  // -(4/c) d_{z_i} d_{zbar_j}, row-major
};

FirstOrderJets first_order(const Jet& v, double c) {
  FirstOrderJets out;
  if (v.valid_degree() >= 1)
    for (int k = 0; k < v.nvars(); ++k) out.d.push_back(derivative(v, k));
  if (v.valid_degree() >= 2) {
    const JetMatrix H = complex_mixed_hessian(v);
    for (const auto& e : H.entries()) out.L.push_back((-1.0 / c) * e);
  }
  return out;
}

double max_modulus(const std::vector<Jet>& js, std::span<const Complex> pt) {
  double m = 0.0;
  for (const auto& j : js) m = std::max(m, std::abs(evaluate(j, pt)));
  return m;
}

// Sparse polynomial in t (variable 0) and the Y_ij (variables 1..n^2).
using Mono = std::vector<int>;
using SPoly = std::map<Mono, Complex>;

SPoly mul(const SPoly& a, const SPoly& b) {
  SPoly out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Mono m(ma.size());
      for (std::size_t k = 0; k < m.size(); ++k) m[k] = ma[k] + mb[k];
      out[m] += ca * cb;
    }
  return out;
}

void add_to(SPoly& a, const SPoly& b, Complex scale) {
  for (const auto& [m, c] : b) a[m] += scale * c;
}

SPoly det(const std::vector<std::vector<SPoly>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  SPoly out;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<SPoly>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<SPoly> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    add_to(out, mul(m[0][j], det(minor)), j % 2 ? -1.0 : 1.0);
  }
  return out;
}

double factorial(int q) {
  double f = 1.0;
  for (int k = 2; k <= q; ++k) f *= k;
  return f;
}

}  // namespace

MajorantParams estimate_params(const Solution& s, double R, double A_floor, int samples) {
  if (!(R > 0.0 && R < 1.0)) throw InvalidInput("majorant radius R must lie in (0, 1)");
  if (R >= s.input.polydisc_radius)
    throw InvalidInput("majorant radius R must be below the input polydisc radius " + std::to_string(s.input.polydisc_radius));
  if (s.config.M < 1) throw InvalidInput("majorant estimate needs M >= 1");
  const Jet& v1 = s.v[1];
  if (v1.valid_degree() < 2) throw InvalidInput("majorant estimate needs v_1 valid through degree 2");
  MajorantParams p;
  p.R = R;
  p.A_floor = A_floor;
  p.M_const = 4.0 / std::abs(s.config.c);
  p.operator_convention =
      "L_ij = -(4/c) d_zi d_zbarj; in real coordinates L_ii = -(1/c)(d_xixi + d_yiyi) and L_ij (i != j) = "
      "-(1/c)(d_xixj + d_yiyj + i(d_xiyj - d_yixj)); M = 4/|c| bounds every entry sum";
  const FirstOrderJets fo = first_order(v1, s.config.c);
  std::vector<std::vector<Complex>> pts = polydisc_samples(v1.nvars(), R, samples);
  for (double r : default_radii(R)) {
    auto more = polydisc_samples(v1.nvars(), r, kCheckPoints);
    pts.insert(pts.end(), more.begin(), more.end());
  }
  for (const auto& pt : pts) {
    const std::span<const Complex> sp(pt);
    p.A_sampled = std::max({p.A_sampled, std::abs(evaluate(v1, sp)), max_modulus(fo.d, sp), max_modulus(fo.L, sp)});
  }
  p.sample_points = static_cast<int>(pts.size());
  p.A = std::max(p.A_sampled, A_floor);
  return p;
}

NonlinearityBounds estimate_nonlinearity_bounds(const Solution& s, const MajorantParams& p, int m_max, int samples) {
  const int n = s.input.n;
  const std::size_t nv = 1 + static_cast<std::size_t>(n * n);
  std::map<Mono, double> sup;  // (p, beta) -> sup |d_{p,beta}|
  for (const auto& pt : polydisc_samples(2 * n, p.R, samples)) {
    const std::span<const Complex> sp(pt);
    std::vector<std::vector<SPoly>> m(static_cast<std::size_t>(n), std::vector<SPoly>(static_cast<std::size_t>(n)));
    std::vector<std::vector<SPoly>> h0(static_cast<std::size_t>(n), std::vector<SPoly>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Complex hij = evaluate(s.input.h(i, j), sp);
        const Complex aij = evaluate(s.g(i, j)[1], sp);
        Mono zero(nv, 0), t(nv, 0), y(nv, 0);
        t[0] = 1;
        y[1 + static_cast<std::size_t>(i * n + j)] = 1;
        auto& e = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        e[zero] = hij;
        e[t] = aij;
        e[y] = 1.0;
        h0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][zero] = hij;
      }
    const Complex dh = det(h0).begin()->second;
    if (dh == Complex{}) throw DegeneracyError("det h vanishes on the sampling polydisc");
    for (const auto& [mono, coef] : det(m)) {
      double& slot = sup[mono];
      slot = std::max(slot, std::abs(coef / dh));
    }
  }
  NonlinearityBounds b;
  b.m_max = m_max;
  for (const auto& [mono, d] : sup) {
    NonlinearityTerm base;
    base.p = mono[0];
    base.beta.assign(mono.begin() + 1, mono.end());
    for (int q = 0;; ++q) {
      NonlinearityTerm term = base;
      term.q = q;
      const int w = term.weight();
      // Y starts at t^2, Z at t: the term reaches t^{p + q + 2|beta|} first.
      if (w > m_max) break;
      // t^0, Z and t cancel against -1 + Z - t b.
      if (w < 2) continue;
      term.bound = d / factorial(q);
      if (term.bound > 0.0) b.terms.push_back(std::move(term));
    }
  }
  return b;
}

std::vector<double> majorant_sequence(const MajorantParams& p, const NonlinearityBounds& b, int m_max) {
  if (m_max < 1) throw InvalidInput("majorant sequence needs m_max >= 1");
  if (b.m_max < m_max) throw InvalidInput("missing nonlinearity bounds beyond order " + std::to_string(b.m_max));
  const double e = p.euler_e;
  std::vector<double> C{p.A};
  for (int m = 2; m <= m_max; ++m) {
    // series C(tau) = sum_{k<m} C_k tau^k, index = power of tau
    std::vector<double> series(static_cast<std::size_t>(m + 1), 0.0);
    for (int k = 1; k < m; ++k) series[static_cast<std::size_t>(k)] = C[static_cast<std::size_t>(k - 1)];
    double total = 0.0;
    for (const auto& t : b.terms) {
      const int shift = t.p + t.beta_total();
      const int j = t.q + t.s + t.alpha + t.beta_total();
      if (shift > m) continue;
      std::vector<double> pw(static_cast<std::size_t>(m + 1), 0.0);
      pw[0] = 1.0;
      for (int r = 0; r < j; ++r) {
        std::vector<double> next(static_cast<std::size_t>(m + 1), 0.0);
        for (int x = 0; x <= m; ++x)
          for (int y = 0; x + y <= m; ++y) next[static_cast<std::size_t>(x + y)] += pw[static_cast<std::size_t>(x)] * series[static_cast<std::size_t>(y)];
        pw = std::move(next);
      }
      const double coeff = pw[static_cast<std::size_t>(m - shift)];
      if (coeff == 0.0) continue;
      total += t.bound * std::pow(p.R, t.weight() - 2) * std::pow(2.0 * e, t.alpha) *
               std::pow(4.0 * e * e * p.M_const, t.beta_total()) * coeff;
    }
    C.push_back(total / p.sigma);
  }
  return C;
}

MajorantReport check_domination(const Solution& s, const MajorantParams& p, const NonlinearityBounds& b,
                                const std::vector<double>& C, std::vector<double> radii, int points) {
  MajorantReport rep;
  rep.params = p;
  rep.bounds = b;
  rep.C = C;
  rep.C1_equals_A = !C.empty() && C.front() == p.A;
  if (radii.empty()) radii = default_radii(p.R);
  rep.check_radii = radii;
  const double e = p.euler_e;
  const int top = std::min<int>(s.config.M, static_cast<int>(C.size()));
  for (int m = 1; m <= top; ++m) {
    const Jet& v = s.v[m];
    const FirstOrderJets fo = v.is_exhausted() ? FirstOrderJets{} : first_order(v, s.config.c);
    for (double r : radii) {
      const double Y = C[static_cast<std::size_t>(m - 1)] / std::pow(p.R - r, 2 * m - 2);
      const auto pts = polydisc_samples(v.nvars(), r, points);
      DominationRow first{m, r, "first", 0.0, Y, static_cast<int>(pts.size()), v.is_exhausted(), false};
      DominationRow second{m, r, "second", 0.0, 2 * e * Y, static_cast<int>(pts.size()), fo.d.empty(), false};
      DominationRow third{m, r, "third", 0.0, 4 * e * e * (m + 1) * p.M_const * Y, static_cast<int>(pts.size()), fo.L.empty(), false};
      for (const auto& pt : pts) {
        const std::span<const Complex> sp(pt);
        if (!first.skipped) first.lhs = std::max(first.lhs, m * std::abs(evaluate(v, sp)));
        if (!second.skipped) second.lhs = std::max(second.lhs, max_modulus(fo.d, sp));
        if (!third.skipped) third.lhs = std::max(third.lhs, max_modulus(fo.L, sp));
      }
      for (DominationRow* row : {&first, &second, &third}) {
        row->pass = !row->skipped && row->lhs <= row->rhs;
        rep.rows.push_back(*row);
      }
    }
  }
  return rep;
}

CauchyCheckReport cauchy_estimate_check(int p, double C, double R, int points) {
  if (p < 0) throw InvalidInput("Cauchy estimate check needs p >= 0");
  if (!(R > 0.0 && R < 1.0)) throw InvalidInput("Cauchy estimate check needs R in (0, 1)");
  constexpr int D = 120;  // truncation error ~ (3/4)^D on the checked discs
  const Jet inv = reciprocal(Jet::constant(1, D, R) - Jet::coordinate(1, D, 0));
  Jet f = Jet::constant(1, D, C);
  for (int k = 0; k < p; ++k) f = f * inv;
  const Jet fx = derivative(f, 0), fy = derivative(f, 1);
  CauchyCheckReport rep;
  rep.R = R;
  const double e = std::numbers::e;
  for (double r : default_radii(R)) {
    CauchyCheckRow row;
    row.p = p;
    row.C = C;
    row.r = r;
    row.hypothesis_rhs = C / std::pow(R - r, p);
    row.rhs = C * e * (p + 1) / std::pow(R - r, p + 1);
    const auto pts = polydisc_samples(2, r, points);
    row.points = static_cast<int>(pts.size());
    for (const auto& pt : pts) {
      const std::span<const Complex> sp(pt);
      row.hypothesis_lhs = std::max(row.hypothesis_lhs, std::abs(evaluate(f, sp)));
      row.lhs = std::max({row.lhs, std::abs(evaluate(fx, sp)), std::abs(evaluate(fy, sp))});
    }
    row.pass = row.hypothesis_lhs <= row.hypothesis_rhs * (1 + 1e-12) && row.lhs <= row.rhs;
    rep.rows.push_back(row);
  }
  return rep;
}

RadiusEstimate radius_estimate(const std::vector<double>& C, double R, double r) {
  if (C.size() < 4) throw InvalidInput("radius estimate needs at least four majorant coefficients");
  if (!(r >= 0.0 && r < R)) throw InvalidInput("radius estimate needs 0 <= r < R");
  RadiusEstimate out;
  const double Y1 = C[0];
  if (std::all_of(C.begin(), C.end(), [](double c) { return c == 0.0; })) {
    out.note = "entire in t at this order (all C_m vanish)";
    return out;
  }
  if (Y1 <= 0.0) {
    out.note = "undefined: C_1 = 0 while later coefficients do not vanish";
    return out;
  }
  double rate = 0.0;
  for (std::size_t k = 1; k < C.size(); ++k) {
    const int m = static_cast<int>(k) + 1;
    if (C[k] <= 0.0) continue;
    const double Ym = C[k] / std::pow(R - r, 2 * m - 2);
    rate = std::max(rate, std::pow(Ym / Y1, 1.0 / (m - 1)));
  }
  if (rate == 0.0) {
    out.note = "entire in t at this order (C_m = 0 for m >= 2)";
    return out;
  }
  out.radius = 1.0 / rate;
  out.note = "heuristic root-test estimate over m = 2.." + std::to_string(C.size()) + " at r = " + std::to_string(r);
  return out;
}

MajorantReport run_majorant(const Solution& s, double R, int m_max) {
  const MajorantParams p = estimate_params(s, R);
  const NonlinearityBounds b = estimate_nonlinearity_bounds(s, p, m_max);
  const std::vector<double> C = majorant_sequence(p, b, m_max);
  MajorantReport rep = check_domination(s, p, b, C);
  for (int k = 0; k <= 4; ++k) {
    const CauchyCheckReport part = cauchy_estimate_check(k, 1.0, R);
    rep.cauchy.R = part.R;
    rep.cauchy.rows.insert(rep.cauchy.rows.end(), part.rows.begin(), part.rows.end());
  }
  if (C.size() >= 4) {
    // The floor on A only keeps Y_1 > 0 in the inequalities; v_1 = 0 means
    // v = 0, so the radius heuristic uses the sampled value.
    MajorantParams unclamped = p;
    unclamped.A = p.A_sampled;
    rep.radius = radius_estimate(p.A_sampled > 0.0 ? C : majorant_sequence(unclamped, b, m_max), R, R / 2);
  } else {
    rep.radius.note = "fewer than four majorant coefficients";
  }
  return rep;
}

}  // namespace crf
