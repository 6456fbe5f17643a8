#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crf/solver.hpp"

namespace crf {

/// Constants of the majorant argument for
///   (t d/dt + 1) v~ = t b + G(t, Z, Y),
///   G = e^{-Z} det(h + t a + Y) / det h - 1 + Z - t b,
/// with v~ = v - v(0), a = g^(1), b = tr(h^{-1} a) and
/// Y_ij = int_0^t L_ij(v~), L_ij = -(4/c) d_{z_i} d_{zbar_j}.
/// Sup norms are taken over the polydisc D_R of the complexified real
/// coordinates and estimated by sampling; nothing here is a proof.
struct MajorantParams {
  double R = 0.5;
  double A = 0.0;           // max(A_sampled, A_floor)
  double A_sampled = 0.0;   // max of |v_1|, |d_i v_1|, |L_ij v_1|
  double A_floor = 1e-8;
  double sigma = 1.0;       // |m - rho| = m + 1 >= m with rho = -1
  double M_const = 0.0;     // 4/|c|: entry sum of L_ij in real coordinates
  double euler_e = 2.718281828459045;
  int sample_points = 0;
  std::string operator_convention;
};

struct NonlinearityTerm {
  int p = 0;              // power of t
  int q = 0;              // power of Z
  int s = 0;              // power of t Z_t (absent for this system)
  int alpha = 0;          // total power of first derivatives (absent)
  std::vector<int> beta;  // powers of Y_ij, row-major
  double bound = 0.0;     // A_{p,q,s,alpha,beta}

  int beta_total() const;
  /// p + q + s + |alpha| + 2|beta|
  int weight() const;
};

struct NonlinearityBounds {
  int m_max = 0;  // every term that can reach t^m_max is present
  std::vector<NonlinearityTerm> terms;
};

struct DominationRow {
  int m = 0;
  double r = 0.0;
  std::string inequality;  // "first", "second" or "third"
  double lhs = 0.0;        // max over sample points
  double rhs = 0.0;
  int points = 0;
  bool skipped = false;
  bool pass = false;
};

struct CauchyCheckRow {
  int p = 0;
  double C = 0.0;
  double r = 0.0;
  double hypothesis_lhs = 0.0;  // max |f|
  double hypothesis_rhs = 0.0;  // C/(R-r)^p
  double lhs = 0.0;             // max |d_i f|
  double rhs = 0.0;             // C e (p+1)/(R-r)^(p+1)
  int points = 0;
  bool pass = false;
};

struct CauchyCheckReport {
  double R = 0.0;
  std::vector<CauchyCheckRow> rows;
  bool passed() const;
};

struct RadiusEstimate {
  std::optional<double> radius;  // none: entire in t at this order
  std::string note;
};

struct MajorantReport {
  MajorantParams params;
  NonlinearityBounds bounds;
  std::vector<double> C;  // C[0] = C_1
  std::vector<DominationRow> rows;
  CauchyCheckReport cauchy;
  RadiusEstimate radius;
  std::vector<double> check_radii;
  bool C1_equals_A = false;

  bool domination_passed() const;
  bool passed() const;
};

/// Sample points on the distinguished boundary |zeta_k| = r of the polydisc
/// in C^nvars: a Weyl sequence of `count` angle vectors plus the 2^nvars
/// real corners (+-r, ..., +-r).
std::vector<std::vector<Complex>> polydisc_samples(int nvars, double r, int count);

MajorantParams estimate_params(const Solution& s, double R, double A_floor = 1e-8, int samples = 128);
NonlinearityBounds estimate_nonlinearity_bounds(const Solution& s, const MajorantParams& p, int m_max, int samples = 128);

/// C_1 = A and, for m >= 2,
///   sigma C_m = sum A_{p,q,s,alpha,beta} R^{w-2} (2e)^|alpha| (4e^2 M)^|beta|
///               [tau^m] tau^{p+|beta|} C(tau)^{q+s+|alpha|+|beta|},
/// C(tau) = sum_{k<m} C_k tau^k, w the term weight. This is the majorant
/// equation in tau = t/(R-r)^2 with (R-r)^{w-2} <= R^{w-2}, so the C_m do
/// not depend on r.
std::vector<double> majorant_sequence(const MajorantParams& p, const NonlinearityBounds& b, int m_max);

/// Inequalities at r in `radii` for m = 1..min(M, m_max), with
/// Y_m(r) = C_m / (R-r)^(2m-2):
///   m |v_m| <= Y_m,  |d_i v_m| <= 2e Y_m,  |L_k v_m| <= 4e^2 (m+1) M Y_m.
MajorantReport check_domination(const Solution& s, const MajorantParams& p, const NonlinearityBounds& b,
                                const std::vector<double>& C, std::vector<double> radii = {}, int points = 100);

/// Derivative estimate |f| <= C/(R-r)^p on D_r  =>  |d_i f| <= C e (p+1)/(R-r)^(p+1)
/// on the test family f = C / (R - x_1)^p, checked on polydisc samples at
/// r = R/4, R/2, 3R/4.
CauchyCheckReport cauchy_estimate_check(int p, double C, double R, int points = 100);

/// Root test on Y_m = C_m/(R-r)^(2m-2): 1 / max_{m>=2} (Y_m/Y_1)^(1/(m-1)).
/// Heuristic. Needs at least four values.
RadiusEstimate radius_estimate(const std::vector<double>& C, double R, double r);

/// estimate_params, bounds, sequence, domination and the Cauchy check.
MajorantReport run_majorant(const Solution& s, double R, int m_max);

}  // namespace crf
