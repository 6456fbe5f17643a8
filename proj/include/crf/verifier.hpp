#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crf/solver.hpp"

namespace crf {

enum class Verdict { pass, fail, skipped };

std::string to_string(Verdict v);

/// One identity at one t-order and one spatial degree. `residual` is the
/// largest coefficient modulus in that degree block; the row passes when
/// residual <= tolerance * scale, where scale = max(1, largest coefficient
/// of any term of the identity at that order).
struct ResidualRow {
  std::string identity;
  int order = 0;
  int degree = -1;  // -1 for skipped rows and scalar checks
  double residual = 0.0;
  double scale = 1.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::skipped;
  std::string note;
};

struct ResidualReport {
  std::string name;
  double tolerance = 0.0;
  std::vector<ResidualRow> rows;
  std::vector<std::string> notes;

  /// No failing row and at least one passing row.
  bool passed() const;
  std::size_t count(Verdict v) const;
  /// Largest residual (absolute, or divided by scale) over non-skipped rows,
  /// optionally restricted to one identity.
  double max_residual(const std::string& identity = {}) const;
  double max_relative(const std::string& identity = {}) const;
  std::vector<std::string> identities() const;
};

struct ClassIntegral {
  bool supported = false;
  std::string reason;       // why unsupported
  double integral = 0.0;    // int_X F, over the unit discs of both charts
  double value = 0.0;       // int_X F / (4 pi), see conventions
  double nearest_integer = 0.0;
  double deviation = 0.0;
  int nodes = 0;
  double error_estimate = 0.0;
};

struct CurvatureReport {
  ResidualReport residuals;  // dF = 0 components and reality of F
  ClassIntegral class_integral;
};

struct SmoothnessReport {
  ResidualReport checks;
  double a = 0.0;                // t-coefficient of e^u at the base point
  double a_expected = 0.0;       // c det h(0)
  double leading_w_inv = 0.0;    // t-coefficient of w^{-1}
  double cone_angle = 0.0;       // 2 pi * leading_w_inv
  bool smooth = false;
};

inline constexpr double kDefaultResidualTolerance = 1e-9;

/// Orders 0..M-1 of 4 u_{z zbar} + c g_t (as H(v_k) + c (k+1) g^(k+1)),
/// (e^u)_t - c det g, e^u - w^{-1} det g and (w^{-1}/t)(1 + t v_t) - c.
ResidualReport residual_system(const Solution& s, double tol = kDefaultResidualTolerance);
/// 4 w_{z zbar} + g_tt with w = (1/t + v_t)/c, orders 0..M-2.
ResidualReport residual_consequence(const Solution& s, double tol = kDefaultResidualTolerance);
/// w^{-1} tr(g^{-1} g_t) + (w^{-1})_t - c, orders 0..M-1.
ResidualReport laplacian_moment(const Solution& s, double tol = kDefaultResidualTolerance);
CurvatureReport curvature_and_class(const Solution& s, double tol = kDefaultResidualTolerance);
/// int_X F at t = 0 for the supported one-dimensional charts (flat:1 and
/// fubini_study_chart:1[,scale]).
ClassIntegral class_integral(const Solution& s);
SmoothnessReport smoothness_check(const Solution& s, double tol = 1e-12);

/// Fault injection: adds delta * (1 + sum |z_i|^2) to coefficient `order`
/// of v, of w_inv, or of every diagonal entry of g. Nothing else is
/// recomputed.
struct Perturbation {
  std::string field;  // "v", "g" or "w_inv"
  int order = 0;
  double delta = 0.0;
};

Perturbation parse_perturbation(const std::string& text);
Solution perturb_solution(const Solution& s, const Perturbation& p);

}  // namespace crf
