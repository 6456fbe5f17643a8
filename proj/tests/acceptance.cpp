// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. Tolerances and budgets are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "crf/cli.hpp"
#include "crf/closed_form.hpp"
#include "crf/majorant.hpp"
#include "crf/verifier.hpp"

using namespace crf;
namespace fs = std::filesystem;

namespace {

constexpr double kFlatSeconds = 1.0;
constexpr double kFsSeconds = 30.0;
constexpr double kCorpusSeconds = 300.0;
constexpr double kCalibrationTol = 1e-9;
constexpr double kConsequenceTol = 1e-9;
constexpr double kLaplacianTol = 1e-9;
constexpr double kClassTol = 1e-3;
constexpr int kClassMinNodes = 256;
constexpr double kCurvatureTol = 1e-9;
constexpr double kLeadingTol = 1e-12;
constexpr double kInjected = 1e-3;
constexpr double kDetected = 1e-4;
constexpr double kMajorantR = 0.5;
constexpr int kMajorantMaxOrder = 8;
constexpr int kMajorantMinPoints = 100;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail << " [FAILED: " << why << "]";
    }
  }
};

int failures = 0;

void print(int k, const std::string& title, Outcome& o) {
  std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << "  " << title << " |" << o.detail.str() << std::endl;
  if (!o.pass) ++failures;
}

Solution run(const std::string& metric, int M, int D, double c = 1.0) {
  SolverConfig cfg;
  cfg.M = M;
  cfg.D = D;
  cfg.c = c;
  return solve(builtin_metric(parse_metric_spec(metric), D), cfg);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

std::vector<std::string> corpus() {
  std::vector<std::string> out;
  for (int n : {1, 2})
    for (int seed = 1; seed <= 5; ++seed) out.push_back("perturbed_flat:" + std::to_string(n) + ",0.1," + std::to_string(seed));
  return out;
}

void criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  double solve_time = 0.0;
  for (int n : {1, 2}) {
    const std::string metric = "flat:" + std::to_string(n);
    const auto ts = Clock::now();
    const Solution s = run(metric, 12, 26);
    solve_time += seconds_since(ts);
    bool exact = true;
    for (int m = 0; m <= 12; ++m) {
      exact = exact && max_abs(s.v[m]) == 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          exact = exact && max_abs_diff(s.g(a, b)[m], m == 0 ? s.input.h(a, b) : Jet(n, 26)) == 0.0;
      const Jet expected = m == 1 ? Jet::constant(n, 26, 1.0) : Jet(n, 26);
      exact = exact && s.w_inv[m].valid_degree() >= 0 && max_abs_diff(s.w_inv[m], expected) == 0.0;
    }
    o.require(exact, metric + " solution is not exactly v = 0, g = h, w_inv = t");
    const CurvatureReport cr = curvature_and_class(s);
    const SmoothnessReport sm = smoothness_check(s);
    double worst = 0.0;
    std::size_t rows = 0;
    const ResidualReport sys = residual_system(s), cons = residual_consequence(s), lap = laplacian_moment(s);
    for (const ResidualReport* r : {&sys, &cons, &lap, &cr.residuals, &sm.checks}) {
      worst = std::max(worst, r->max_residual());
      rows += r->count(Verdict::pass) + r->count(Verdict::fail);
      o.require(r->count(Verdict::fail) == 0, metric + " " + r->name + " has failing rows");
    }
    o.require(worst == 0.0, metric + " max residual " + fmt(worst) + " is not exactly 0");
    o.detail << " " << metric << ": " << rows << " residual rows, max " << worst << ";";
  }
  const double total = seconds_since(t0);
  o.detail << " solve " << fmt(solve_time) << " s, solve+verify " << fmt(total) << " s (budget " << kFlatSeconds << " s)";
  o.require(total < kFlatSeconds, "runtime over budget");
  print(1, "flat base, M = 12, D = 26: exact solution, zero residuals", o);
}

void criterion2() {
  Outcome o;
  const auto t0 = Clock::now();
  const Solution s = run("fubini_study_chart:1,1", 8, 12);
  const CalibrationReport cr = calibrate(s, kCalibrationTol);
  const double t = seconds_since(t0);
  const auto& set = calibration_candidates();
  o.require(cr.kappa.has_value(), "no calibration candidate matched");
  if (cr.kappa) {
    o.require(std::find(set.begin(), set.end(), *cr.kappa) != set.end(), "kappa outside the candidate set");
    o.detail << " kappa = " << *cr.kappa << (cr.kappa_unique ? " (unique)" : " (not unique)");
  }
  o.require(cr.max_deviation <= kCalibrationTol, "deviation above tolerance");
  o.detail << ", max relative deviation " << cr.max_deviation << " (tol " << kCalibrationTol << "), " << fmt(t) << " s";
  o.require(t < kFsSeconds, "runtime over budget");
  print(2, "Fubini-Study chart n = 1 matches the closed form after calibration", o);
}

struct CorpusEntry {
  std::string metric;
  Solution s;
};

std::vector<CorpusEntry> criterion3() {
  Outcome o;
  std::vector<CorpusEntry> kept;
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t rows = 0;
  for (const auto& metric : corpus()) {
    Solution s = run(metric, 8, 20);
    const ResidualReport r = residual_consequence(s, kConsequenceTol);
    o.require(r.passed(), metric + " consequence check failed (max relative " + fmt(r.max_relative()) + ")");
    int top = -1;
    for (const auto& row : r.rows)
      if (row.verdict == Verdict::pass) top = std::max(top, row.order);
    o.require(top == 8 - 2, metric + " does not reach order M - 2");
    worst = std::max(worst, r.max_relative());
    rows += r.count(Verdict::pass);
    kept.push_back({metric, std::move(s)});
  }
  const double t = seconds_since(t0);
  o.detail << " 10 scenarios, " << rows << " passing rows, max relative residual " << worst << " (tol " << kConsequenceTol
           << "), " << fmt(t) << " s (budget " << kCorpusSeconds << " s)";
  o.require(t < kCorpusSeconds, "runtime over budget");
  print(3, "second-order consequence holds on the perturbed corpus", o);
  return kept;
}

void criterion4(const std::vector<CorpusEntry>& c1) {
  Outcome o;
  double worst_rel = 0.0, worst_abs = 0.0;
  for (double c : {1.0, 2.0})
    for (const auto& e : c1) {
      const Solution s = c == 1.0 ? e.s : run(e.metric, 8, 20, c);
      const ResidualReport r = laplacian_moment(s, kLaplacianTol);
      o.require(r.passed(), e.metric + " c=" + fmt(c) + " Laplacian check failed (max relative " + fmt(r.max_relative()) + ")");
      worst_rel = std::max(worst_rel, r.max_relative());
      worst_abs = std::max(worst_abs, r.max_residual());
    }
  o.require(worst_abs <= kLaplacianTol, "absolute coefficient residual above tolerance");
  o.detail << " 20 runs (c = 1, 2), max |Lap t - c| coefficient " << worst_abs << ", max relative " << worst_rel
           << " (tol " << kLaplacianTol << ")";
  print(4, "Laplacian of t equals c on the corpus", o);
}

void criterion5(const std::vector<CorpusEntry>& c1) {
  Outcome o;
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& e : c1) {
    const MajorantReport r = run_majorant(e.s, kMajorantR, kMajorantMaxOrder);
    o.require(r.domination_passed(), e.metric + " domination failed");
    o.require(r.C1_equals_A && !r.C.empty() && r.C[0] == r.params.A, e.metric + " C_1 != A");
    o.require(r.cauchy.passed(), e.metric + " Cauchy estimate check failed");
    std::set<double> radii;
    int max_m = 0;
    for (const auto& row : r.rows) {
      if (row.skipped) continue;
      radii.insert(row.r);
      max_m = std::max(max_m, row.m);
      o.require(row.points >= kMajorantMinPoints, e.metric + " too few sample points");
      if (row.rhs > 0) worst = std::max(worst, row.lhs / row.rhs);
      ++checked;
    }
    o.require(radii.size() == 3, e.metric + " not checked at three radii");
    o.require(max_m == kMajorantMaxOrder, e.metric + " orders do not reach " + std::to_string(kMajorantMaxOrder));
  }
  o.detail << " R = " << kMajorantR << ", m <= " << kMajorantMaxOrder << ", " << checked
           << " inequality rows, worst lhs/rhs " << fmt(worst) << "; C_1 = A; Cauchy family passes";
  print(5, "majorant domination on the corpus", o);
}

void criterion6() {
  Outcome o;
  const Solution s = run("fubini_study_chart:1,1", 8, 12);
  const CurvatureReport cr = curvature_and_class(s, kCurvatureTol);
  const ClassIntegral& ci = cr.class_integral;
  o.require(ci.supported, "class integral unsupported: " + ci.reason);
  o.require(std::abs(ci.value + 2.0) <= kClassTol, "class integral " + fmt(ci.value) + " not within tolerance of -2");
  o.require(ci.nodes >= kClassMinNodes, "too few quadrature nodes");
  o.require(cr.residuals.passed(), "curvature residual rows failed");
  double df_abs = 0.0, df_rel = 0.0;
  for (const auto& id : cr.residuals.identities())
    if (id.rfind("dF", 0) == 0) {
      df_abs = std::max(df_abs, cr.residuals.max_residual(id));
      df_rel = std::max(df_rel, cr.residuals.max_relative(id));
    }
  o.require(df_abs <= kCurvatureTol, "absolute dF residual above tolerance");
  o.detail << " value " << std::setprecision(15) << ci.value << std::setprecision(6) << " (|dev| " << std::abs(ci.value + 2.0)
           << ", tol " << kClassTol << "), " << ci.nodes << " nodes, dF max " << df_abs << " abs / " << df_rel
           << " relative (tol " << kCurvatureTol << ")";
  print(6, "class integral of F on CP^1 is -2, dF = 0", o);
}

void criterion7() {
  Outcome o;
  double worst = 0.0;
  for (const char* metric : {"flat:1", "flat:2", "fubini_study_chart:1,1", "fubini_study_chart:2,1"})
    for (double c : {1.0, 2.0, 4.0}) {
      const Solution s = run(metric, 4, 8, c);
      const SmoothnessReport r = smoothness_check(s, kLeadingTol);
      const std::string tag = std::string(metric) + " c=" + fmt(c);
      o.require(r.smooth == (c == 1.0), tag + " wrong smoothness verdict");
      o.require(r.checks.passed(), tag + " leading-coefficient checks failed");
      const double dev = std::abs(r.a - r.a_expected) / std::max(1.0, std::abs(r.a_expected));
      o.require(dev <= kLeadingTol, tag + " a != c det h(0)");
      worst = std::max(worst, dev);
    }
  o.detail << " 12 runs: smooth exactly when c = 1; max |a - c det h(0)| relative " << worst << " (tol " << kLeadingTol << ")";
  print(7, "smoothness verdicts and leading coefficient", o);
}

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / ("crf_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(std::vector<std::string> args, std::ostream& out) {
  args.insert(args.begin(), "crf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::set<std::string> names_a, names_b;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) names_a.insert(fs::relative(e.path(), a).string());
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) names_b.insert(fs::relative(e.path(), b).string());
  if (names_a != names_b || names_a.empty()) return false;
  for (const auto& n : names_a)
    if (slurp(a / n) != slurp(b / n)) return false;
  files += names_a.size();
  return true;
}

bool bitwise_equal(const Jet& a, const Jet& b) {
  return a.valid_degree() == b.valid_degree() && a.coeffs().size() == b.coeffs().size() &&
         std::memcmp(a.coeffs().data(), b.coeffs().data(), a.coeffs().size_bytes()) == 0;
}

bool bitwise_equal(const Solution& x, const Solution& y) {
  for (int m = 0; m <= x.config.M; ++m) {
    if (!bitwise_equal(x.v[m], y.v[m]) || !bitwise_equal(x.w_inv[m], y.w_inv[m]) || !bitwise_equal(x.exp_u[m], y.exp_u[m]))
      return false;
    for (int a = 0; a < x.input.n; ++a)
      for (int b = 0; b < x.input.n; ++b)
        if (!bitwise_equal(x.g(a, b)[m], y.g(a, b)[m])) return false;
  }
  return true;
}

void criterion8(const fs::path& root) {
  Outcome o;
  const fs::path in = root / "scenarios";
  fs::create_directories(in);
  std::ofstream(in / "flat2.ini") << "[solver]\nM = 8\nD = 16\n[metric]\nbuiltin = flat:2\n";
  std::ofstream(in / "fs1.ini") << "[solver]\nM = 8\nD = 12\n[metric]\nbuiltin = fubini_study_chart:1,1\n";
  std::ofstream(in / "fs1c2.ini") << "[solver]\nM = 8\nD = 12\nc = 2\n[metric]\nbuiltin = fubini_study_chart:1,1\n";
  std::ofstream(in / "pert1.ini") << "[solver]\nM = 8\nD = 20\n[metric]\nbuiltin = perturbed_flat:1,0.1,4\n";
  std::ofstream(in / "pert2.ini") << "[solver]\nM = 6\nD = 14\n[metric]\nbuiltin = perturbed_flat:2,0.1,2\n";
  std::ofstream(in / "inline.ini")
      << "[solver]\nM = 6\nD = 12\n[metric]\nn = 2\nh11 = 1 + 0.1*(x1^2 + y1^2)\nh12 = 0.05*(x1 - i*y1)*(x2 + i*y2)\n"
         "h22 = 1 + 0.1*(x2^2 + y2^2)\n";
  std::vector<std::string> files;
  for (const char* f : {"flat2", "fs1", "fs1c2", "pert1", "pert2", "inline"}) files.push_back((in / (std::string(f) + ".ini")).string());

  std::size_t compared = 0;
  for (const char* command : {"solve", "verify", "majorant", "compare", "closed-form"}) {
    std::vector<int> codes;
    std::vector<fs::path> dirs;
    for (const char* jobs : {"1", "4", "1"}) {
      const fs::path out = root / "runs" / (std::string(command) + "_" + std::to_string(dirs.size()));
      std::vector<std::string> args{command, "--no-timestamp", "--jobs", jobs, "--out", out.string()};
      for (const auto& f : files) {
        args.push_back("--metric-file");
        args.push_back(f);
      }
      std::ostringstream sink;
      codes.push_back(cli(args, sink));
      dirs.push_back(out);
    }
    o.require(codes[0] == codes[1] && codes[1] == codes[2], std::string(command) + " exit codes differ between runs");
    for (std::size_t k = 1; k < dirs.size(); ++k)
      o.require(same_tree(dirs[0], dirs[k], compared), std::string(command) + " outputs differ between runs");
  }
  const Solution a = run("perturbed_flat:2,0.1,3", 6, 14), b = run("perturbed_flat:2,0.1,3", 6, 14);
  o.require(bitwise_equal(a, b), "repeated in-process solve is not bitwise identical");
  o.detail << " 6 scenarios x 5 commands, runs with --jobs 1, 4, 1: " << compared
           << " file comparisons byte-identical; repeated solve bitwise identical";
  print(8, "reports are byte-identical across repeats and --jobs", o);
}

void criterion9(const fs::path& root) {
  Outcome o;
  double smallest = INFINITY;
  std::size_t cases = 0;
  for (const char* metric : {"fubini_study_chart:1,1", "perturbed_flat:2,0.1,1", "flat:1"})
    for (const std::string field : {"v:2:", "g:2:", "w_inv:3:"}) {
      const std::string perturb = field + "0.001";
      const fs::path out = root / "negative" / std::to_string(cases++);
      std::ostringstream sink;
      const int code = cli({"verify", "--metric", metric, "--M", "8", "--D", "14", "--no-timestamp", "--system", "--perturb",
                            perturb, "--out", out.string()},
                           sink);
      const std::string tag = std::string(metric) + " " + perturb;
      o.require(code == kExitCheckFailure, tag + " exit code " + std::to_string(code));
      const auto j = nlohmann::json::parse(slurp(out / "report.json"));
      double detected = 0.0;
      for (const auto& id : j["checks"]["system"]["identities"])
        if (id["max_residual"].is_number()) detected = std::max(detected, id["max_residual"].get<double>());
      o.require(detected >= kDetected, tag + " residual " + fmt(detected) + " below threshold");
      smallest = std::min(smallest, detected);
    }
  o.detail << " " << cases << " injections of " << kInjected << " (v, g, w_inv on 3 metrics): all exit 1, smallest reported residual "
           << smallest << " (threshold " << kDetected << ")";
  print(9, "injected perturbations are detected", o);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const fs::path root = scratch_dir();
  try {
    criterion1();
    criterion2();
    const std::vector<CorpusEntry> c1 = criterion3();
    criterion4(c1);
    criterion5(c1);
    criterion6();
    criterion7();
    criterion8(root);
    criterion9(root);
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    ++failures;
  }
  fs::remove_all(root);
  std::cout << (failures ? "FAILED" : "ALL PASSED") << ": " << failures << " criteria failed, " << fmt(seconds_since(t0))
            << " s total" << std::endl;
  return failures ? 1 : 0;
}
