#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crf/kahler.hpp"
#include "crf/solver.hpp"

namespace crf {

/// Constant principal Ricci curvatures: eigenvalues of h^{-1} rho.
struct RicciSpectrum {
  int n = 0;
  std::vector<double> eigenvalues;
};

/// Real polynomial in t, coefficients in increasing degree.
struct Polynomial {
  std::vector<double> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  double operator()(double t) const;
  double coeff(int k) const { return k >= 0 && k < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(k)] : 0.0; }
};

Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial derivative(const Polynomial& p);
/// Antiderivative vanishing at 0.
Polynomial integral(const Polynomial& p);

/// num/den with den(0) != 0.
struct RationalT {
  Polynomial num;
  Polynomial den;

  double operator()(double t) const { return num(t) / den(t); }
  /// Taylor coefficients at t = 0 through t^order.
  std::vector<double> series(int order) const;
};

/// P(t) = prod (1 + lambda_i t).
Polynomial p_of_t(const RicciSpectrum& spec);
/// w^{-1}(t) = int_0^t P / P.
RationalT w_inv_closed(const Polynomial& P);

struct OmegaSeries {
  TJetMatrix g;  // phi + t rho
  TJet det;      // det(phi + t rho)
};

OmegaSeries omega_of_t(const JetMatrix& phi, const JetMatrix& rho, int order);

/// Spectrum of h^{-1} rho(h). The elementary symmetric functions of the
/// eigenvalues are the t-coefficients of det(h + t rho)/det h; they are
/// required to be spatially constant, through their valid degree, to
/// relative tolerance `tol`. Throws InvalidInput otherwise.
RicciSpectrum spectrum_from_metric(const InitialData& data, double tol = 1e-6);

/// Scalars tried, in order, for g_solver(t) = omega(kappa t).
const std::vector<double>& calibration_candidates();

struct CalibrationCandidate {
  double kappa = 0.0;
  double g_deviation = 0.0;
  double w_deviation = 0.0;
  bool matched = false;
};

struct CalibrationReport {
  RicciSpectrum spectrum;
  Polynomial P;
  RationalT w_closed;
  std::vector<CalibrationCandidate> candidates;
  std::optional<double> kappa;   // first matching candidate
  bool kappa_unique = false;     // false when several candidates match (e.g. rho = 0)
  double max_deviation = 0.0;    // of the chosen candidate
  double det_deviation = 0.0;    // det(phi + t rho) vs P(t) det phi, relative
  double tolerance = 0.0;
};

/// Compares the solver output with phi + (kappa t) rho and with
/// (c/kappa) w_closed(kappa t), coefficientwise over valid degrees, with
/// relative deviation |a - b| / max(1, |b|).
CalibrationReport calibrate(const Solution& s, double tol = 1e-9);

}  // namespace crf
