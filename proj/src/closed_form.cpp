#include "crf/closed_form.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "crf/errors.hpp"

namespace crf {

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  r.c.assign(std::max(a.c.size(), b.c.size()), 0.0);
  for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k));
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c.empty() || b.c.empty()) return {};
  Polynomial r;
  r.c.assign(a.c.size() + b.c.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

Polynomial derivative(const Polynomial& p) {
  Polynomial r;
  for (std::size_t k = 1; k < p.c.size(); ++k) r.c.push_back(static_cast<double>(k) * p.c[k]);
  if (r.c.empty()) r.c.push_back(0.0);
  return r;
}

Polynomial integral(const Polynomial& p) {
  Polynomial r;
  r.c.push_back(0.0);
  for (std::size_t k = 0; k < p.c.size(); ++k) r.c.push_back(p.c[k] / static_cast<double>(k + 1));
  return r;
}

std::vector<double> RationalT::series(int order) const {
  const double d0 = den.coeff(0);
  if (d0 == 0.0) throw InvalidInput("rational function has a pole at t = 0");
  std::vector<double> s(static_cast<std::size_t>(order + 1), 0.0);
  for (int k = 0; k <= order; ++k) {
    double acc = num.coeff(k);
    for (int j = 1; j <= k; ++j) acc -= den.coeff(j) * s[static_cast<std::size_t>(k - j)];
    s[static_cast<std::size_t>(k)] = acc / d0;
  }
  return s;
}

Polynomial p_of_t(const RicciSpectrum& spec) {
  Polynomial p{{1.0}};
  for (double l : spec.eigenvalues) p = p * Polynomial{{1.0, l}};
  return p;
}

RationalT w_inv_closed(const Polynomial& P) {
  if (std::abs(P.coeff(0) - 1.0) > 1e-14) throw InvalidInput("w_inv_closed: P(0) must be 1");
  return RationalT{integral(P), P};
}

OmegaSeries omega_of_t(const JetMatrix& phi, const JetMatrix& rho, int order) {
  const int n = phi.n();
  if (rho.n() != n) throw InvalidInput("omega_of_t: size mismatch");
  OmegaSeries out;
  out.g = TJetMatrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      TJet e(phi(i, j).n(), phi(i, j).max_degree(), order);
      e[0] = phi(i, j);
      if (order >= 1) e[1] = rho(i, j);
      out.g(i, j) = std::move(e);
    }
  out.det = jet_det(out.g);
  return out;
}

namespace {

double relative_deviation(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Worst deviation of jet `a` from the spatially constant value `b`,
// over the coefficients through valid_degree.
double deviation_from_constant(const Jet& a, Complex b) {
  if (a.is_exhausted()) return 0.0;
  double worst = relative_deviation(a.constant_term(), b);
  const std::size_t upto = a.space().size_upto(a.valid_degree());
  for (std::size_t k = 1; k < upto; ++k) worst = std::max(worst, std::abs(a[k]) / std::max(1.0, std::abs(b)));
  return worst;
}

double deviation(const Jet& a, const Jet& b) {
  const int d = std::min(a.valid_degree(), b.valid_degree());
  if (d < 0) return 0.0;
  double worst = 0.0;
  const std::size_t upto = a.space().size_upto(d);
  for (std::size_t k = 0; k < upto; ++k) worst = std::max(worst, relative_deviation(a[k], b[k]));
  return worst;
}

}  // namespace

RicciSpectrum spectrum_from_metric(const InitialData& data, double tol) {
  const int n = data.n;
  if (data.h(0, 0).valid_degree() < 2) throw InvalidInput("spectrum_from_metric: need degree cap >= 2");
  const JetMatrix rho = ricci_form(data.h);
  JetMatrix phi = map_entries(data.h, [&](const Jet& e) { return e.truncated(rho(0, 0).valid_degree()); });
  const OmegaSeries om = omega_of_t(phi, rho, n);
  const Jet inv_det = reciprocal(jet_det(phi));
  for (int k = 1; k <= n; ++k) {
    const Jet sym = om.det[k] * inv_det;
    if (deviation_from_constant(sym, sym.constant_term()) > tol)
      throw InvalidInput("principal Ricci curvatures are not constant (elementary symmetric function " + std::to_string(k) +
                         " varies by " + std::to_string(deviation_from_constant(sym, sym.constant_term())) + ")");
  }
  Eigen::MatrixXcd h0(n, n), r0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      h0(i, j) = data.h(i, j).constant_term();
      r0(i, j) = rho(i, j).constant_term();
    }
  // h0 is Hermitian positive, so h0^{-1} r0 has real eigenvalues.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(r0, h0);
  if (es.info() != Eigen::Success) throw InvalidInput("spectrum_from_metric: eigen solver failed");
  RicciSpectrum spec;
  spec.n = n;
  for (int i = 0; i < n; ++i) spec.eigenvalues.push_back(es.eigenvalues()(i));
  return spec;
}

const std::vector<double>& calibration_candidates() {
  static const std::vector<double> list = {1.0, 2.0, 4.0, 0.5, 0.25};
  return list;
}

CalibrationReport calibrate(const Solution& s, double tol) {
  CalibrationReport rep;
  rep.tolerance = tol;
  rep.spectrum = spectrum_from_metric(s.input);
  rep.P = p_of_t(rep.spectrum);
  rep.w_closed = w_inv_closed(rep.P);

  const int n = s.input.n;
  const int M = s.config.M;
  const double c = s.config.c;
  const JetMatrix rho = ricci_form(s.input.h);
  const JetMatrix phi = map_entries(s.input.h, [&](const Jet& e) { return e.truncated(rho(0, 0).valid_degree()); });

  // det(phi + t rho) = P(t) det phi
  {
    const OmegaSeries om = omega_of_t(phi, rho, n);
    const Jet det_phi = jet_det(phi);
    for (int k = 0; k <= n; ++k) rep.det_deviation = std::max(rep.det_deviation, deviation(om.det[k], rep.P.coeff(k) * det_phi));
  }

  const std::vector<double> wser = rep.w_closed.series(s.w_inv.order());
  for (double kappa : calibration_candidates()) {
    CalibrationCandidate cand;
    cand.kappa = kappa;
    for (int m = 0; m <= M; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Jet& a = s.g(i, j)[m];
          Jet b = m == 0 ? phi(i, j) : m == 1 ? kappa * rho(i, j) : Jet(a.n(), a.max_degree());
          cand.g_deviation = std::max(cand.g_deviation, deviation(a, b));
        }
    double kpow = 1.0;
    for (int m = 0; m <= s.w_inv.order(); ++m) {
      const Complex expected = (c / kappa) * kpow * wser[static_cast<std::size_t>(m)];
      cand.w_deviation = std::max(cand.w_deviation, deviation_from_constant(s.w_inv[m], expected));
      kpow *= kappa;
    }
    cand.matched = cand.g_deviation <= tol && cand.w_deviation <= tol;
    rep.candidates.push_back(cand);
  }
  int matches = 0;
  for (const auto& cand : rep.candidates)
    if (cand.matched) {
      if (!rep.kappa) {
        rep.kappa = cand.kappa;
        rep.max_deviation = std::max(cand.g_deviation, cand.w_deviation);
      }
      ++matches;
    }
  rep.kappa_unique = matches == 1;
  if (!rep.kappa) {
    rep.max_deviation = rep.candidates.front().g_deviation;
    for (const auto& cand : rep.candidates)
      rep.max_deviation = std::min(rep.max_deviation, std::max(cand.g_deviation, cand.w_deviation));
  }
  return rep;
}

}  // namespace crf
