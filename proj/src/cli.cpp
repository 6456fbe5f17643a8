#include "crf/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "crf/closed_form.hpp"
#include "crf/errors.hpp"
#include "crf/format.hpp"
#include "crf/majorant.hpp"
#include "crf/report.hpp"
#include "crf/scenario.hpp"
#include "crf/verifier.hpp"

namespace crf {

namespace {

constexpr const char* kVersion = "1.0.0";

struct Flags {
  int M = 8;
  int D = 12;
  double c = 1.0;
  double R = 0.5;
  double tol = kDefaultResidualTolerance;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool no_timestamp = false;
  int jobs = 1;
  bool strict = false;

  std::string metric;
  std::vector<std::string> metric_files;
  std::string base_point;
  std::vector<std::string> perturb;
  bool system = false, consequence = false, laplacian = false, curvature = false, smoothness = false;
  int m_max = -1;
  std::string eigenvalues;
  int n = 0;
};

struct RunResult {
  int code = kExitPass;
  Json report;
  ReportBundle bundle;
  std::string summary;
  std::string error;
};

Json report_header(const std::string& command, const std::string& scenario) {
  Json j;
  j["tool"] = "crf";
  j["version"] = kVersion;
  j["command"] = command;
  j["scenario"] = scenario;
  return j;
}

void finish(RunResult& r, bool timestamp) {
  r.report["verdict"] = r.code == kExitPass ? "pass" : r.code == kExitCheckFailure ? "fail" : "error";
  r.report["exit_code"] = r.code;
  if (!r.error.empty()) r.report["error"] = r.error;
  if (timestamp) r.report["generated_at"] = utc_timestamp();
  r.bundle.files.insert(r.bundle.files.begin(), ReportFile{"report.json", r.report.dump(2) + "\n"});
}

void add_solution_files(ReportBundle& b, const Solution& s) {
  b.add("v.csv", coefficients_csv(s.v, "v"));
  b.add("g.csv", coefficients_csv(s.g, "g"));
  b.add("exp_u.csv", coefficients_csv(s.exp_u, "exp_u"));
  b.add("w_inv.csv", coefficients_csv(s.w_inv, "w_inv"));
}

void run_verify(const Scenario& sc, Solution s, RunResult& r) {
  for (const auto& p : sc.perturbations) s = perturb_solution(s, p);
  Json checks = Json::object();
  std::vector<ResidualReport> kept;
  kept.reserve(5);
  bool ok = true;
  const auto residual = [&](const char* key, ResidualReport rep) {
    checks[key] = to_json(rep);
    ok = ok && rep.passed();
    kept.push_back(std::move(rep));
  };
  if (sc.checks.system) residual("system", residual_system(s, sc.tolerance));
  if (sc.checks.consequence) residual("consequence", residual_consequence(s, sc.tolerance));
  if (sc.checks.laplacian) residual("laplacian", laplacian_moment(s, sc.tolerance));
  if (sc.checks.curvature) {
    CurvatureReport cr = curvature_and_class(s, sc.tolerance);
    checks["curvature"] = to_json(cr);
    ok = ok && cr.residuals.passed();
    kept.push_back(std::move(cr.residuals));
  }
  if (sc.checks.smoothness) {
    SmoothnessReport sm = smoothness_check(s);
    checks["smoothness"] = to_json(sm);
    ok = ok && sm.checks.passed();
    kept.push_back(std::move(sm.checks));
  }
  if (kept.empty()) throw InvalidInput("no checks selected");
  std::vector<const ResidualReport*> ptrs;
  for (const auto& k : kept) ptrs.push_back(&k);
  r.report["checks"] = checks;
  r.bundle.add("residuals.csv", residuals_csv(ptrs));
  r.code = ok ? kExitPass : kExitCheckFailure;
}

void run_majorant_cmd(const Scenario& sc, const Solution& s, RunResult& r) {
  const int m_max = sc.m_max < 0 ? sc.solver.M : sc.m_max;
  const MajorantReport mr = run_majorant(s, sc.R, m_max);
  r.report["majorant"] = to_json(mr);
  r.bundle.add("majorant_sequence.csv", majorant_sequence_csv(mr));
  r.bundle.add("majorant_checks.csv", majorant_checks_csv(mr));
  r.bundle.add("nonlinearity_terms.csv", nonlinearity_terms_csv(mr));
  r.bundle.add("cauchy_check.csv", cauchy_check_csv(mr));
  r.code = mr.passed() ? kExitPass : kExitCheckFailure;
}

void run_compare(const Scenario& sc, const Solution& s, RunResult& r) {
  const CalibrationReport cr = calibrate(s, sc.tolerance);
  r.report["calibration"] = to_json(cr);
  r.bundle.add("calibration.csv", calibration_csv(cr));
  r.bundle.add("closed_form.csv", closed_form_csv(cr.P, cr.w_closed, sc.solver.M));
  const bool ok = cr.kappa && cr.max_deviation <= sc.tolerance;
  r.code = ok ? kExitPass : kExitCheckFailure;
}

Json closed_form_json(const RicciSpectrum& spec, int order, ReportBundle& b) {
  const Polynomial P = p_of_t(spec);
  const RationalT w = w_inv_closed(P);
  Json j;
  j["spectrum"] = to_json(spec);
  j["P"] = to_json(P);
  j["w_inv"] = {{"num", to_json(w.num)}, {"den", to_json(w.den)}, {"series", w.series(order)}};
  b.add("closed_form.csv", closed_form_csv(P, w, order));
  return j;
}

RunResult run_scenario(const std::string& command, const Scenario& sc) {
  RunResult r;
  r.report = report_header(command, sc.name);
  r.report["config"] = config_json(sc, command);
  r.report["conventions"] = conventions_json();
  Json warnings = Json::array();
  try {
    validate_config(sc.solver);
    if (!(sc.tolerance > 0)) throw InvalidInput("tolerance must be positive");
    const InitialData data = build_initial_data(sc);
    r.report["input"] = to_json(data);
    if (command == "closed-form") {
      r.report["closed_form"] = closed_form_json(spectrum_from_metric(data), sc.solver.M, r.bundle);
    } else {
      const Solution s = solve(data, sc.solver);
      for (const auto& w : s.warnings) warnings.push_back(w);
      r.report["solution"] = to_json(s);
      if (command == "solve") add_solution_files(r.bundle, s);
      if (command == "verify") run_verify(sc, s, r);
      if (command == "majorant") run_majorant_cmd(sc, s, r);
      if (command == "compare") run_compare(sc, s, r);
    }
  } catch (const InvalidInput& e) {
    r.code = kExitInvalidInput;
    r.error = std::string("invalid input: ") + e.what();
  } catch (const DegeneracyError& e) {
    r.code = kExitDegeneracy;
    r.error = std::string("numerical degeneracy: ") + e.what();
  } catch (const std::exception& e) {
    r.code = kExitInvalidInput;
    r.error = std::string("error: ") + e.what();
  }
  r.report["warnings"] = warnings;
  finish(r, sc.timestamp);
  r.summary = sc.name + ": " + command + " " + sc.metric_label() + " -> " + r.report["verdict"].get<std::string>() +
              " (exit " + std::to_string(r.code) + ")";
  return r;
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part, what));
  return out;
}

// Defaults < scenario file < command-line flags.
void apply_flags(Scenario& sc, const Flags& f, const CLI::App& app, const CLI::App& sub) {
  const auto given = [&](const char* name) {
    if (const CLI::Option* o = sub.get_option_no_throw(name); o && o->count()) return true;
    const CLI::Option* o = app.get_option_no_throw(name);
    return o && o->count() > 0;
  };
  if (given("--M")) sc.solver.M = f.M;
  if (given("--D")) sc.solver.D = f.D;
  if (given("--c")) sc.solver.c = f.c;
  if (given("--R")) sc.R = f.R;
  if (given("--tol")) sc.tolerance = f.tol;
  if (given("--seed")) sc.seed = f.seed;
  if (given("--strict-validity")) sc.solver.strict_validity = true;
  if (given("--no-timestamp")) sc.timestamp = false;
  if (given("--base-point")) sc.base_point = parse_number_list(f.base_point, "base point");
  if (given("--m-max")) sc.m_max = f.m_max;
  for (const auto& p : f.perturb) sc.perturbations.push_back(parse_perturbation(p));
  if (f.system || f.consequence || f.laplacian || f.curvature || f.smoothness)
    sc.checks = {f.system, f.consequence, f.laplacian, f.curvature, f.smoothness};
}

std::vector<Scenario> resolve_scenarios(const Flags& f, const CLI::App& app, const CLI::App& sub) {
  std::vector<Scenario> out;
  if (!f.metric.empty() && !f.metric_files.empty()) throw InvalidInput("give either --metric or --metric-file, not both");
  if (!f.metric.empty()) {
    Scenario sc;
    sc.metric = parse_metric_spec(f.metric);
    out.push_back(std::move(sc));
  }
  for (const auto& path : f.metric_files) out.push_back(parse_scenario_file(path));
  if (out.empty()) throw InvalidInput("no metric given; use --metric SPEC or --metric-file FILE");
  std::set<std::string> names;
  for (auto& sc : out) {
    apply_flags(sc, f, app, sub);
    if (!names.insert(sc.name).second) throw InvalidInput("two scenarios share the name '" + sc.name + "'");
  }
  return out;
}

std::vector<RunResult> run_all(const std::string& command, const std::vector<Scenario>& scenarios, int jobs) {
  std::vector<RunResult> results(scenarios.size());
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), scenarios.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) results[i] = run_scenario(command, scenarios[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < scenarios.size(); i = next++) results[i] = run_scenario(command, scenarios[i]);
    });
  for (auto& t : pool) t.join();
  return results;
}

int emit(const std::vector<RunResult>& results, const std::vector<Scenario>& scenarios, const Flags& f,
         std::ostream& out, std::ostream& err) {
  int code = kExitPass;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const RunResult& r = results[i];
    const Scenario& sc = scenarios[i];
    std::optional<std::string> dir;
    if (!f.out_dir.empty())
      dir = results.size() > 1 ? (std::filesystem::path(f.out_dir) / sc.name).string() : f.out_dir;
    else if (sc.output_dir)
      dir = *sc.output_dir;
    int c = r.code;
    if (dir) {
      try {
        r.bundle.write(*dir);
        out << r.summary << "\n";
      } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        c = std::max(c, kExitInvalidInput);
      }
    } else {
      out << r.bundle.find("report.json")->content;
      err << r.summary << "\n";
    }
    if (!r.error.empty()) err << sc.name << ": " << r.error << "\n";
    code = std::max(code, c);
  }
  return code;
}

int list_metrics(std::ostream& out) {
  for (const auto& b : builtin_metrics()) out << b.usage << "\n    " << b.description << "\n";
  return kExitPass;
}

int closed_form_from_eigenvalues(const Flags& f, const CLI::App& app, std::ostream& out, std::ostream& err) {
  RicciSpectrum spec;
  spec.eigenvalues = parse_number_list(f.eigenvalues, "eigenvalues");
  if (f.n > 0) {
    if (spec.eigenvalues.size() == 1) spec.eigenvalues.assign(static_cast<std::size_t>(f.n), spec.eigenvalues[0]);
    if (spec.eigenvalues.size() != static_cast<std::size_t>(f.n))
      throw InvalidInput("--eigenvalues has " + std::to_string(spec.eigenvalues.size()) + " values but --n is " +
                         std::to_string(f.n));
  }
  if (spec.eigenvalues.empty()) throw InvalidInput("--eigenvalues needs at least one value");
  spec.n = static_cast<int>(spec.eigenvalues.size());
  const int order = f.M;
  if (order < 1) throw InvalidInput("--M must be >= 1");

  RunResult r;
  r.report = report_header("closed-form", "eigenvalues");
  r.report["config"] = {{"command", "closed-form"}, {"eigenvalues", spec.eigenvalues}, {"order", order}};
  r.report["closed_form"] = closed_form_json(spec, order, r.bundle);
  r.report["warnings"] = Json::array();
  const auto* nt = app.get_option_no_throw("--no-timestamp");
  finish(r, !(nt && nt->count()));
  r.summary = "eigenvalues: closed-form -> pass (exit 0)";
  Scenario sc;
  sc.name = "eigenvalues";
  return emit({r}, {sc}, f, out, err);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Formal Ricci-flat Kahler metrics on C^n x R+ as truncated series in t", "crf"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;

  app.add_option("--M", f.M, "t-truncation order")->check(CLI::PositiveNumber);
  app.add_option("--D", f.D, "spatial degree cap")->check(CLI::NonNegativeNumber);
  app.add_option("--c", f.c, "constant in u_t = c w");
  app.add_option("--R", f.R, "polydisc radius for the majorant check")->check(CLI::PositiveNumber);
  app.add_option("--tol", f.tol, "residual / calibration tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", f.seed, "seed for randomized built-in metrics");
  app.add_option("--out", f.out_dir, "output directory (JSON goes to stdout without it)");
  app.add_flag("--no-timestamp", f.no_timestamp, "omit the timestamp so reports are byte-stable");
  app.add_option("--jobs", f.jobs, "scenarios run concurrently")->check(CLI::PositiveNumber);

  const auto scenario_options = [&f](CLI::App* sub) {
    sub->add_option("--metric", f.metric, "built-in metric, e.g. fubini_study_chart:1,1");
    sub->add_option("--metric-file", f.metric_files, "scenario file (repeatable; each is its own run)");
    sub->add_option("--base-point", f.base_point, "expansion point x1,y1,...,xn,yn");
    sub->add_flag("--strict-validity", f.strict, "fail instead of exhausting orders beyond the degree budget");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve the recursion and write coefficient tables");
  scenario_options(solve_cmd);

  CLI::App* verify_cmd = app.add_subcommand("verify", "check the identities; no selector means all");
  scenario_options(verify_cmd);
  verify_cmd->add_flag("--system", f.system, "the first-order system");
  verify_cmd->add_flag("--consequence", f.consequence, "the second-order consequence in t");
  verify_cmd->add_flag("--laplacian", f.laplacian, "Laplacian of t");
  verify_cmd->add_flag("--curvature", f.curvature, "dF = 0 and the class integral");
  verify_cmd->add_flag("--smoothness", f.smoothness, "leading coefficients and cone angle");
  verify_cmd->add_option("--perturb", f.perturb, "inject FIELD:ORDER:DELTA before checking (repeatable)");

  CLI::App* cf_cmd = app.add_subcommand("closed-form", "P(t) and w^-1(t) for a constant Ricci spectrum");
  scenario_options(cf_cmd);
  cf_cmd->add_option("--eigenvalues", f.eigenvalues, "comma-separated eigenvalues of h^-1 rho");
  cf_cmd->add_option("--n", f.n, "dimension (a single eigenvalue is repeated)")->check(CLI::Range(1, kMaxComplexDim));

  CLI::App* maj_cmd = app.add_subcommand("majorant", "majorant sequence and domination checks");
  scenario_options(maj_cmd);
  maj_cmd->add_option("--m-max", f.m_max, "highest order of the majorant sequence")->check(CLI::PositiveNumber);

  CLI::App* cmp_cmd = app.add_subcommand("compare", "calibrate the solver output against the closed form");
  scenario_options(cmp_cmd);

  app.add_subcommand("list-metrics", "list built-in metrics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInvalidInput;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    if (command == "list-metrics") return list_metrics(out);
    if (command == "closed-form" && !f.eigenvalues.empty()) {
      if (!f.metric.empty() || !f.metric_files.empty()) throw InvalidInput("give either --eigenvalues or a metric, not both");
      return closed_form_from_eigenvalues(f, app, out, err);
    }
    if (command == "closed-form" && f.n > 0) throw InvalidInput("--n needs --eigenvalues");
    const std::vector<Scenario> scenarios = resolve_scenarios(f, app, *sub);
    return emit(run_all(command, scenarios, f.jobs), scenarios, f, out, err);
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}

}  // namespace crf
