#pragma once

#include <string>
#include <vector>

#include "crf/kahler.hpp"

namespace crf {

struct SolverConfig {
  double c = 1.0;         // the constant in u_t = c w; smooth extension needs c = 1
  int M = 8;              // t-truncation order
  int D = 12;             // spatial degree cap
  double tolerance = 1e-12;
  // Throw on validity exhaustion instead of emitting exhausted coefficients.
  bool strict_validity = false;
};

void validate_config(const SolverConfig& cfg);

/// Coefficients v_0..v_m and g^(0)..g^(m) of the regularized unknowns
/// v (with e^u = t e^v) and g_ij.
struct SolverState {
  InitialData input;
  SolverConfig config;
  std::vector<Jet> v;
  std::vector<JetMatrix> g;
  int m = 0;
  std::vector<std::string> warnings;
};

struct Solution {
  SolverConfig config;
  InitialData input;
  TJet v;        // u = log t + v; the regular part of u is v itself
  TJetMatrix g;  // g^(0) = h
  TJet exp_u;    // t e^v, zero constant term
  TJet w_inv;    // c t / (1 + t v_t), zero constant term
  /// max relative deviation between w_inv and c int_0^t det g / det g
  double w_inv_crosscheck = 0.0;
  std::vector<std::string> warnings;

  const TJet& u_reg() const { return v; }
};

/// v_0 = log(c det h), g^(0) = h.
SolverState init_state(const InitialData& h, const SolverConfig& cfg);

/// Advances one order:
///   g^(m+1) = -(4 d dbar v_m) / (c (m+1))
///   (m+2) v_{m+1} = [c e^{-v} det g]_{m+1} evaluated with v_{m+1} = 0.
/// v_{m+1} enters the bracket linearly with coefficient -c e^{-v_0} det h = -1,
/// which is what turns (m+1) into m+2; the divisor never vanishes.
SolverState step(const SolverState& state);

Solution solve(const InitialData& h, const SolverConfig& cfg);

/// t-series of v and g assembled from a state (orders 0..state.m).
TJet state_v(const SolverState& s);
TJetMatrix state_g(const SolverState& s);

/// Largest spatial degree trusted at each order (D - 2m, or -1).
int expected_valid_degree(const SolverConfig& cfg, int order);

}  // namespace crf
