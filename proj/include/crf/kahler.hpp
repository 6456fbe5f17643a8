#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crf/jet.hpp"
#include "crf/matrix.hpp"
#include "crf/tjet.hpp"

// Conventions used throughout the library (and recorded in every report):
//
//   d/dz_k    = (d/dx_k - i d/dy_k) / 2
//   d/dzbar_k = (d/dx_k + i d/dy_k) / 2
//   complex_mixed_hessian(f)_ij = 4 d^2 f / dz_i dzbar_j, so the diagonal is
//   the coordinate Laplacian f_{x_i x_i} + f_{y_i y_i};
//   the metric evolution is 4 (d dbar u)_ij + c (g_ij)_t = 0 with exactly
//   that factor 4;
//   ricci_form(g)_ij = -d^2 log det g / dz_i dzbar_j, with no factor 4.
//
// Closed-form comparisons go through closed_form::calibrate rather than
// inserting factors by hand.

namespace crf {

using JetMatrix = HermitianMatrix<Jet>;
using TJetMatrix = HermitianMatrix<TJet>;

/// Name and parameters of a built-in metric, e.g. "fubini_study_chart:1,2"
/// or "product:flat:1+fubini_study_chart:1,1".
struct MetricSpec {
  std::string name;
  std::vector<double> params;
  std::vector<MetricSpec> factors;  // product only

  std::string to_string() const;
  int complex_dimension() const;
};

MetricSpec parse_metric_spec(const std::string& text);

struct BuiltinInfo {
  std::string name;
  std::string usage;
  std::string description;
};
const std::vector<BuiltinInfo>& builtin_metrics();

/// Real-analytic Kahler data on a chart of C^n: jets of h_ij at base_point.
struct InitialData {
  int n = 0;
  JetMatrix h;
  std::vector<double> base_point;  // 2n reals, the origin of the jets
  double polydisc_radius = 1.0;
  std::optional<MetricSpec> source;  // set for built-in metrics
  std::string description;
};

/// Hermitian at the coefficient level, real diagonal, positive definite
/// at the base point. Throws InvalidInput otherwise.
void validate_initial_data(const InitialData& data, double tol = 1e-12);

JetMatrix complex_mixed_hessian(const Jet& f);
Jet jet_det(const JetMatrix& g);
TJet jet_det(const TJetMatrix& g);
JetMatrix ricci_form(const JetMatrix& g);

/// Constant terms as a dense complex matrix (row-major n*n).
std::vector<Complex> value_at_base(const JetMatrix& g);
/// Entries evaluated at a point of the chart (row-major n*n).
std::vector<Complex> value_at(const JetMatrix& g, std::span<const Complex> point);
/// Smallest eigenvalue of a Hermitian matrix given row-major.
double min_eigenvalue(const std::vector<Complex>& m, int n);

/// Built-in metrics, expanded to degree D around base_point (default: the
/// origin). Throws InvalidInput for unknown names, bad parameters, or data
/// that is not positive at the base.
InitialData builtin_metric(const MetricSpec& spec, int max_degree, std::vector<double> base_point = {});

InitialData flat_metric(int n, int max_degree);
/// scale * d dbar log(1 + |z|^2) on the affine chart of CP^n.
InitialData fubini_study_chart(int n, double scale, int max_degree, std::vector<double> base_point = {});
/// delta_ij + eps * d_i dbar_j phi for a seeded random real polynomial phi of
/// the given degree; Kahler by construction.
InitialData perturbed_flat(int n, double eps, std::uint64_t seed, int degree, int max_degree,
                           std::vector<double> base_point = {});
InitialData product_metric(const std::vector<InitialData>& factors);

}  // namespace crf
