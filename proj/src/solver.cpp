#include "crf/solver.hpp"

#include <algorithm>
#include <cmath>

#include "crf/errors.hpp"
#include "crf/format.hpp"

namespace crf {

void validate_config(const SolverConfig& cfg) {
  if (!(cfg.c != 0.0) || !std::isfinite(cfg.c)) throw InvalidInput("c must be a nonzero finite number");
  if (cfg.M < 1) throw InvalidInput("M must be >= 1");
  if (cfg.D < 2) throw InvalidInput("D must be >= 2");
  if (!(cfg.tolerance > 0)) throw InvalidInput("tolerance must be positive");
}

int expected_valid_degree(const SolverConfig& cfg, int order) { return std::max(-1, cfg.D - 2 * order); }

SolverState init_state(const InitialData& h, const SolverConfig& cfg) {
  validate_config(cfg);
  validate_initial_data(h);
  if (h.h(0, 0).max_degree() != cfg.D)
    throw InvalidInput("initial data degree cap " + std::to_string(h.h(0, 0).max_degree()) + " differs from D = " +
                       std::to_string(cfg.D));
  const Jet det_h = jet_det(h.h);
  const Complex lead = cfg.c * det_h.constant_term();
  if (!(lead.real() > 0) || std::abs(lead.imag()) > cfg.tolerance * std::abs(lead))
    throw InvalidInput("c * det h must be positive at the base point (got " + format_double(lead.real()) + ")");

  SolverState s;
  s.input = h;
  s.config = cfg;
  s.v.push_back(log(cfg.c * det_h));
  s.g.push_back(h.h);
  if (cfg.D < 2 * cfg.M + 2)
    s.warnings.push_back("D = " + std::to_string(cfg.D) + " < 2M + 2 = " + std::to_string(2 * cfg.M + 2) +
                         ": orders above " + std::to_string(cfg.D / 2) + " carry no trusted spatial coefficients");
  return s;
}

TJet state_v(const SolverState& s) { return TJet(s.v); }

TJetMatrix state_g(const SolverState& s) {
  const int n = s.input.n;
  TJetMatrix g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<Jet> c;
      for (const auto& gm : s.g) c.push_back(gm(i, j));
      g(i, j) = TJet(std::move(c));
    }
  return g;
}

SolverState step(const SolverState& state) {
  SolverState s = state;
  const auto& cfg = s.config;
  const int m = s.m;
  const int n = s.input.n;
  const int D = cfg.D;
  const int target_valid = D - 2 * (m + 1);

  // e^{v_0} = c det h is what makes the linear coefficient of v_{m+1} exactly -1.
  const Complex base_ratio = std::exp(-s.v[0].constant_term()) * cfg.c * jet_det(s.input.h).constant_term();
  if (std::abs(base_ratio - 1.0) > cfg.tolerance)
    throw DegeneracyError("initial condition e^{v0} = c det h violated at the base point");

  const Jet& vm = s.v[static_cast<std::size_t>(m)];
  if (vm.valid_degree() < 2) {
    if (cfg.strict_validity)
      throw DegeneracyError("validity exhausted at order " + std::to_string(m + 1) + ": D = " + std::to_string(D) +
                            " is too small for M = " + std::to_string(cfg.M));
    s.g.push_back(JetMatrix(n, Jet::exhausted(n, D)));
    s.v.push_back(Jet::exhausted(n, D));
    s.m = m + 1;
    return s;
  }

  JetMatrix next = complex_mixed_hessian(vm);
  const Complex factor = -1.0 / (cfg.c * (m + 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) next(i, j) *= factor;
  s.g.push_back(std::move(next));

  // E = c e^{-v} det g through order m+1 with the unknown v_{m+1} set to 0.
  std::vector<Jet> v_coeffs = s.v;
  v_coeffs.push_back(Jet(n, D).truncated(target_valid));
  const TJet minus_v = -TJet(std::move(v_coeffs));
  const TJet det_g = jet_det(state_g(s));
  const Jet e_next = cfg.c * product_coeff(exp(minus_v), det_g, m + 1);

  Jet v_next = e_next * Complex(1.0 / (m + 2));
  v_next.truncate(target_valid);
  s.v.push_back(std::move(v_next));
  s.m = m + 1;
  return s;
}

namespace {

double relative_deviation(const TJet& a, const TJet& b) {
  double worst = 0.0;
  for (int k = 0; k <= std::min(a.order(), b.order()); ++k) {
    const double scale = std::max({1.0, max_abs(a[k]), max_abs(b[k])});
    worst = std::max(worst, max_abs_diff(a[k], b[k]) / scale);
  }
  return worst;
}

}  // namespace

Solution solve(const InitialData& h, const SolverConfig& cfg) {
  SolverState s = init_state(h, cfg);
  while (s.m < cfg.M) s = step(s);

  Solution sol;
  sol.config = cfg;
  sol.input = h;
  sol.v = state_v(s);
  sol.g = state_g(s);
  sol.warnings = s.warnings;
  const int n = h.n;
  const int D = cfg.D;

  sol.exp_u = t_shift_up(exp(sol.v)).truncated_order(cfg.M);

  // w = u_t / c = (1/t + v_t) / c, so w^{-1} = c t / (1 + t v_t).
  TJet denom = t_shift_up(t_derive(sol.v));
  denom[0] += Jet::constant(n, D, 1.0);
  sol.w_inv = (cfg.c * t_shift_up(reciprocal(denom))).truncated_order(cfg.M);

  // Same quantity from e^u = c int_0^t det g and det g = w e^u.
  const TJet det_g = jet_det(sol.g);
  const TJet alt = (cfg.c * t_integrate(det_g)).truncated_order(cfg.M) * reciprocal(det_g);
  sol.w_inv_crosscheck = relative_deviation(sol.w_inv, alt);
  if (sol.w_inv_crosscheck > 1e-9)
    sol.warnings.push_back("w_inv cross-check deviation " + format_double(sol.w_inv_crosscheck));
  return sol;
}

}  // namespace crf
