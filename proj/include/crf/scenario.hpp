#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crf/kahler.hpp"
#include "crf/solver.hpp"
#include "crf/verifier.hpp"

namespace crf {

struct CheckSelection {
  bool system = true;
  bool consequence = true;
  bool laplacian = true;
  bool curvature = true;
  bool smoothness = true;
};

/// Everything one run needs. Built from a scenario file, then overridden
/// by command-line flags.
struct Scenario {
  std::string name = "scenario";
  SolverConfig solver;
  double R = 0.5;
  int m_max = -1;  // -1: use M
  double tolerance = kDefaultResidualTolerance;
  std::optional<std::uint64_t> seed;  // replaces perturbed_flat seeds

  std::optional<MetricSpec> metric;
  std::vector<double> base_point;
  // Inline metric: n and the upper-triangle entries as expressions.
  int inline_n = 0;
  std::vector<std::vector<std::string>> inline_entries;  // [i][j], "" when absent
  double inline_radius = 1.0;

  CheckSelection checks;
  std::vector<Perturbation> perturbations;

  std::optional<std::string> output_dir;
  bool timestamp = true;

  std::string metric_label() const;
};

/// INI-style scenario file: sections [solver], [metric], [majorant],
/// [checks], [output]. Unknown sections or keys are rejected.
Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& name = "scenario");

/// Polynomial expression in x1..xn, y1..yn with +, -, *, integer powers
/// (^), parentheses, decimal literals and the imaginary unit i.
Jet parse_expression(const std::string& text, int n, int max_degree);

/// Applies the seed override and builds the initial data at degree D.
InitialData build_initial_data(const Scenario& sc);

}  // namespace crf
