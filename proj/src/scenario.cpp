#include "crf/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "crf/errors.hpp"
#include "crf/format.hpp"

namespace crf {

namespace {

using boost::property_tree::ptree;

int parse_int(const std::string& s, const char* what) {
  const double d = parse_double(s, what);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw InvalidInput(std::string(what) + " must be an integer, got '" + s + "'");
  return static_cast<int>(d);
}

bool parse_bool(const std::string& s, const char* what) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw InvalidInput(std::string(what) + " must be true or false, got '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(trim(part), what));
  return out;
}

void set_seed(MetricSpec& spec, std::uint64_t seed) {
  if (spec.name == "perturbed_flat" && spec.params.size() >= 3) spec.params[2] = static_cast<double>(seed);
  for (auto& f : spec.factors) set_seed(f, seed);
}

// Recursive descent over the expression grammar.
class ExprParser {
 public:
  ExprParser(const std::string& text, int n, int D) : s_(text), n_(n), D_(D) {}

  Jet parse() {
    Jet r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidInput("expression '" + s_ + "' at position " + std::to_string(pos_) + ": " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Jet expr() {
    Jet acc = term();
    for (;;) {
      if (eat('+'))
        acc += term();
      else if (eat('-'))
        acc -= term();
      else
        return acc;
    }
  }
  Jet term() {
    Jet acc = unary();
    while (eat('*')) acc = acc * unary();
    return acc;
  }
  // Unary minus binds looser than ^, so -x1^2 = -(x1^2).
  Jet unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  Jet power() {
    Jet base = primary();
    if (!eat('^')) return base;
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a nonnegative integer");
    const int k = std::stoi(s_.substr(start, pos_ - start));
    Jet r = Jet::constant(n_, D_, 1.0);
    for (int j = 0; j < k && !r.is_zero(); ++j) r = r * base;
    return r;
  }
  Jet primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char ch = s_[pos_];
    if (ch == '(') {
      ++pos_;
      Jet r = expr();
      if (!eat(')')) fail("missing ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
        if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
          pos_ = p;
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
      }
      return Jet::constant(n_, D_, parse_double(s_.substr(start, pos_ - start), "number"));
    }
    if (ch == 'i') {
      ++pos_;
      return Jet::constant(n_, D_, Complex(0.0, 1.0));
    }
    if (ch == 'x' || ch == 'y') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("variable needs an index");
      const int k = std::stoi(s_.substr(start, pos_ - start));
      if (k < 1 || k > n_) fail("variable index out of range 1.." + std::to_string(n_));
      return Jet::coordinate(n_, D_, 2 * (k - 1) + (ch == 'y' ? 1 : 0));
    }
    fail("unexpected '" + std::string(1, ch) + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
  int n_;
  int D_;
};

void check_keys(const ptree& section, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : section)
    if (!allowed.count(key)) throw InvalidInput("unknown key '" + key + "' in [" + name + "]");
}

Scenario from_tree(const ptree& pt, const std::string& name) {
  Scenario sc;
  sc.name = name;
  for (const auto& [section, body] : pt) {
    if (!body.data().empty()) throw InvalidInput("key '" + section + "' outside of a section");
    if (section == "solver") {
      check_keys(body, section, {"c", "M", "D", "strict_validity"});
      for (const auto& [k, v] : body) {
        const std::string val = trim(v.data());
        if (k == "c") sc.solver.c = parse_double(val, "c");
        if (k == "M") sc.solver.M = parse_int(val, "M");
        if (k == "D") sc.solver.D = parse_int(val, "D");
        if (k == "strict_validity") sc.solver.strict_validity = parse_bool(val, "strict_validity");
      }
    } else if (section == "metric") {
      std::set<std::string> allowed{"builtin", "n", "base_point", "seed", "radius"};
      for (int i = 1; i <= kMaxComplexDim; ++i)
        for (int j = 1; j <= kMaxComplexDim; ++j) allowed.insert("h" + std::to_string(i) + std::to_string(j));
      check_keys(body, section, allowed);
      for (const auto& [k, v] : body) {
        const std::string val = trim(v.data());
        if (k == "builtin") sc.metric = parse_metric_spec(val);
        if (k == "n") sc.inline_n = parse_int(val, "n");
        if (k == "base_point") sc.base_point = parse_list(val, "base_point");
        if (k == "seed") sc.seed = static_cast<std::uint64_t>(parse_int(val, "seed"));
        if (k == "radius") sc.inline_radius = parse_double(val, "radius");
      }
      if (sc.inline_n != 0) {
        if (sc.metric) throw InvalidInput("[metric] takes either builtin or inline entries, not both");
        if (sc.inline_n < 1 || sc.inline_n > kMaxComplexDim) throw InvalidInput("[metric] n must be in 1..4");
        const auto n = static_cast<std::size_t>(sc.inline_n);
        sc.inline_entries.assign(n, std::vector<std::string>(n));
        for (const auto& [k, v] : body) {
          if (k.size() != 3 || k[0] != 'h') continue;
          const std::size_t i = static_cast<std::size_t>(k[1] - '1'), j = static_cast<std::size_t>(k[2] - '1');
          if (i >= n || j >= n) throw InvalidInput("[metric] entry " + k + " exceeds n = " + std::to_string(n));
          sc.inline_entries[i][j] = trim(v.data());
        }
      } else if (!sc.metric) {
        throw InvalidInput("[metric] needs builtin = SPEC or n plus entries h11, h12, ...");
      }
    } else if (section == "majorant") {
      check_keys(body, section, {"R", "m_max"});
      for (const auto& [k, v] : body) {
        if (k == "R") sc.R = parse_double(trim(v.data()), "R");
        if (k == "m_max") sc.m_max = parse_int(trim(v.data()), "m_max");
      }
    } else if (section == "checks") {
      check_keys(body, section, {"system", "consequence", "laplacian", "curvature", "smoothness", "tolerance", "perturb"});
      for (const auto& [k, v] : body) {
        const std::string val = trim(v.data());
        if (k == "system") sc.checks.system = parse_bool(val, "system");
        if (k == "consequence") sc.checks.consequence = parse_bool(val, "consequence");
        if (k == "laplacian") sc.checks.laplacian = parse_bool(val, "laplacian");
        if (k == "curvature") sc.checks.curvature = parse_bool(val, "curvature");
        if (k == "smoothness") sc.checks.smoothness = parse_bool(val, "smoothness");
        if (k == "tolerance") sc.tolerance = parse_double(val, "tolerance");
        if (k == "perturb")
          for (const auto& p : split(val, ','))
            if (!trim(p).empty()) sc.perturbations.push_back(parse_perturbation(trim(p)));
      }
    } else if (section == "output") {
      check_keys(body, section, {"dir", "timestamp"});
      for (const auto& [k, v] : body) {
        if (k == "dir") sc.output_dir = trim(v.data());
        if (k == "timestamp") sc.timestamp = parse_bool(trim(v.data()), "timestamp");
      }
    } else {
      throw InvalidInput("unknown section [" + section + "]");
    }
  }
  if (!sc.metric && sc.inline_n == 0) throw InvalidInput("scenario has no [metric] section");
  return sc;
}

}  // namespace

std::string Scenario::metric_label() const {
  if (metric) return metric->to_string();
  return "inline:" + std::to_string(inline_n);
}

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidInput("scenario " + name + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return from_tree(pt, name);
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), std::filesystem::path(path).stem().string());
}

Jet parse_expression(const std::string& text, int n, int max_degree) { return ExprParser(text, n, max_degree).parse(); }

InitialData build_initial_data(const Scenario& sc) {
  const int D = sc.solver.D;
  if (sc.metric) {
    MetricSpec spec = *sc.metric;
    if (sc.seed) set_seed(spec, *sc.seed);
    return builtin_metric(spec, D, sc.base_point);
  }
  const int n = sc.inline_n;
  if (!sc.base_point.empty()) throw InvalidInput("base_point applies to built-in metrics; write inline entries around the origin");
  InitialData d;
  d.n = n;
  d.h = JetMatrix(n);
  d.base_point.assign(static_cast<std::size_t>(2 * n), 0.0);
  d.polydisc_radius = sc.inline_radius;
  d.description = "inline metric";
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const std::string& up = sc.inline_entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const std::string& lo = sc.inline_entries[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      const std::string key = "h" + std::to_string(i + 1) + std::to_string(j + 1);
      if (i == j && up.empty()) throw InvalidInput("inline metric is missing the diagonal entry " + key);
      Jet e = up.empty() ? (lo.empty() ? Jet(n, D) : conj(parse_expression(lo, n, D))) : parse_expression(up, n, D);
      if (i == j && max_abs_diff(e, conj(e)) > 1e-12) throw InvalidInput("diagonal entry " + key + " is not real");
      if (i != j && !up.empty() && !lo.empty() && max_abs_diff(parse_expression(lo, n, D), conj(e)) > 1e-12)
        throw InvalidInput("inline metric is not Hermitian: h" + std::to_string(j + 1) + std::to_string(i + 1) + " != conj(" + key + ")");
      d.h(i, j) = e;
      if (i != j) d.h(j, i) = conj(e);
    }
  validate_initial_data(d);
  return d;
}

}  // namespace crf
