#include "crf/kahler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "crf/errors.hpp"
#include "crf/format.hpp"

namespace crf {

namespace {

int positive_int(double v, const std::string& what) {
  if (v < 1 || v != std::floor(v)) throw InvalidInput(what + " must be a positive integer");
  return static_cast<int>(v);
}

std::vector<double> origin_if_empty(std::vector<double> base, int n) {
  if (base.empty()) base.assign(static_cast<std::size_t>(2 * n), 0.0);
  if (static_cast<int>(base.size()) != 2 * n) throw InvalidInput("base point must have 2n real coordinates");
  return base;
}

// Global coordinate x0_var + X_var as a jet around the base point.
Jet shifted_coordinate(int n, int max_degree, const std::vector<double>& base, int var) {
  return Jet::constant(n, max_degree, base[static_cast<std::size_t>(var)]) + Jet::coordinate(n, max_degree, var);
}

}  // namespace

// ---------------------------------------------------------------------------
// Metric specs

std::string MetricSpec::to_string() const {
  std::string out = name;
  if (name == "product") {
    out += ":";
    for (std::size_t k = 0; k < factors.size(); ++k) out += (k ? "+" : "") + factors[k].to_string();
    return out;
  }
  for (std::size_t k = 0; k < params.size(); ++k) out += (k ? "," : ":") + format_double(params[k]);
  return out;
}

int MetricSpec::complex_dimension() const {
  if (name == "product") {
    int n = 0;
    for (const auto& f : factors) n += f.complex_dimension();
    return n;
  }
  if (params.empty()) throw InvalidInput("metric '" + name + "' needs a dimension parameter");
  return positive_int(params[0], "metric dimension");
}

MetricSpec parse_metric_spec(const std::string& text) {
  MetricSpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
  if (spec.name == "product") {
    if (rest.empty()) throw InvalidInput("product metric needs factors, e.g. product:flat:1+fubini_study_chart:1,1");
    for (const auto& part : split(rest, '+')) spec.factors.push_back(parse_metric_spec(part));
    if (spec.complex_dimension() > kMaxComplexDim) throw InvalidInput("complex dimension must be in 1..4");
    return spec;
  }
  const bool known = std::any_of(builtin_metrics().begin(), builtin_metrics().end(),
                                 [&](const BuiltinInfo& b) { return b.name == spec.name; });
  if (!known) throw InvalidInput("unknown metric '" + spec.name + "' (see list-metrics)");
  if (!rest.empty())
    for (const auto& p : split(rest, ',')) spec.params.push_back(parse_double(p, "metric parameter"));
  builtin_metric(spec, 0);  // parameter checks live in the constructors
  return spec;
}

const std::vector<BuiltinInfo>& builtin_metrics() {
  static const std::vector<BuiltinInfo> list = {
      {"flat", "flat:n", "Euclidean metric h = I on C^n"},
      {"fubini_study_chart", "fubini_study_chart:n[,scale]",
       "scale * d dbar log(1+|z|^2) on the affine chart of CP^n (Kahler-Einstein)"},
      {"perturbed_flat", "perturbed_flat:n,eps,seed[,degree]",
       "I + eps * d dbar phi, phi a seeded random real polynomial of the given degree (default 4)"},
      {"product", "product:SPEC+SPEC[+...]", "block-diagonal product of built-in metrics"},
  };
  return list;
}

// ---------------------------------------------------------------------------
// Geometry

JetMatrix complex_mixed_hessian(const Jet& f) {
  if (f.valid_degree() < 2)
    throw DegeneracyError("mixed Hessian needs valid_degree >= 2 (got " + std::to_string(f.valid_degree()) + ")");
  const int n = f.n();
  std::vector<Jet> dx, dy;
  for (int k = 0; k < n; ++k) {
    dx.push_back(derivative(f, 2 * k));
    dy.push_back(derivative(f, 2 * k + 1));
  }
  JetMatrix h(n);
  const Complex I(0, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        h(i, i) = derivative(dx[static_cast<std::size_t>(i)], 2 * i) + derivative(dy[static_cast<std::size_t>(i)], 2 * i + 1);
        continue;
      }
      // (d_xi - i d_yi)(d_xj + i d_yj) f
      Jet e = derivative(dx[static_cast<std::size_t>(j)], 2 * i) + derivative(dy[static_cast<std::size_t>(j)], 2 * i + 1);
      e += I * (derivative(dy[static_cast<std::size_t>(j)], 2 * i) - derivative(dx[static_cast<std::size_t>(j)], 2 * i + 1));
      h(i, j) = std::move(e);
    }
  return h;
}

Jet jet_det(const JetMatrix& g) { return determinant(g); }
TJet jet_det(const TJetMatrix& g) { return determinant(g); }

JetMatrix ricci_form(const JetMatrix& g) {
  JetMatrix rho = complex_mixed_hessian(log(jet_det(g)));
  for (int i = 0; i < rho.n(); ++i)
    for (int j = 0; j < rho.n(); ++j) rho(i, j) *= -0.25;
  return rho;
}

std::vector<Complex> value_at_base(const JetMatrix& g) {
  std::vector<Complex> out;
  for (const auto& e : g.entries()) out.push_back(e.constant_term());
  return out;
}

std::vector<Complex> value_at(const JetMatrix& g, std::span<const Complex> point) {
  std::vector<Complex> out;
  for (const auto& e : g.entries()) out.push_back(evaluate(e, point));
  return out;
}

double min_eigenvalue(const std::vector<Complex>& m, int n) {
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = m[static_cast<std::size_t>(i * n + j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void validate_initial_data(const InitialData& data, double tol) {
  if (data.n < 1 || data.n > kMaxComplexDim) throw InvalidInput("complex dimension must be in 1..4");
  if (data.h.n() != data.n) throw InvalidInput("metric matrix size does not match n");
  if (static_cast<int>(data.base_point.size()) != 2 * data.n) throw InvalidInput("base point must have 2n coordinates");
  if (!(data.polydisc_radius > 0)) throw InvalidInput("polydisc radius must be positive");
  for (const auto& e : data.h.entries())
    if (e.n() != data.n) throw InvalidInput("metric entries live in the wrong dimension");
  double scale = 1.0;
  for (const auto& e : data.h.entries()) scale = std::max(scale, max_abs(e));
  if (hermitian_defect(data.h) > tol * scale)
    throw InvalidInput("metric is not Hermitian: h_ij != conj(h_ji) (defect " +
                       format_double(hermitian_defect(data.h)) + ")");
  const double lambda = min_eigenvalue(value_at_base(data.h), data.n);
  if (!(lambda > 0)) throw InvalidInput("metric is not positive definite at the base point (min eigenvalue " +
                                        format_double(lambda) + ")");
}

// ---------------------------------------------------------------------------
// Built-in metrics

InitialData flat_metric(int n, int max_degree) {
  InitialData d;
  d.n = n;
  d.h = JetMatrix(n, Jet(n, max_degree));
  for (int i = 0; i < n; ++i) d.h(i, i) = Jet::constant(n, max_degree, 1.0);
  d.base_point.assign(static_cast<std::size_t>(2 * n), 0.0);
  d.polydisc_radius = 1.0;
  d.source = MetricSpec{"flat", {static_cast<double>(n)}, {}};
  d.description = "flat C^" + std::to_string(n);
  return d;
}

InitialData fubini_study_chart(int n, double scale, int max_degree, std::vector<double> base_point) {
  if (!(scale > 0)) throw InvalidInput("Fubini-Study scale must be positive");
  base_point = origin_if_empty(std::move(base_point), n);
  const Complex I(0, 1);
  std::vector<Jet> z, zb;
  Jet q = Jet::constant(n, max_degree, 1.0);
  for (int k = 0; k < n; ++k) {
    Jet xk = shifted_coordinate(n, max_degree, base_point, 2 * k);
    Jet yk = shifted_coordinate(n, max_degree, base_point, 2 * k + 1);
    q += xk * xk + yk * yk;
    z.push_back(xk + I * yk);
    zb.push_back(xk - I * yk);
  }
  const Jet inv_q = reciprocal(q);
  const Jet inv_q2 = inv_q * inv_q;
  InitialData d;
  d.n = n;
  d.h = JetMatrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet e = -(zb[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)] * inv_q2);
      if (i == j) e += inv_q;
      d.h(i, j) = scale * e;
    }
  d.base_point = std::move(base_point);
  // 1 + sum (x_k^2 + y_k^2) stays away from 0 on the complex polydisc of
  // radius 1/sqrt(2n) around the origin.
  d.polydisc_radius = 1.0 / std::sqrt(2.0 * n);
  d.source = MetricSpec{"fubini_study_chart", {static_cast<double>(n), scale}, {}};
  d.description = "Fubini-Study chart of CP^" + std::to_string(n);
  validate_initial_data(d);
  return d;
}

InitialData perturbed_flat(int n, double eps, std::uint64_t seed, int degree, int max_degree,
                           std::vector<double> base_point) {
  if (degree < 2) throw InvalidInput("perturbed_flat: potential degree must be >= 2");
  base_point = origin_if_empty(std::move(base_point), n);
  // phi is built with two spare degrees so its Levi form is exact to max_degree.
  const int work = max_degree + 2;
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };

  std::vector<Jet> coords;
  for (int v = 0; v < 2 * n; ++v) coords.push_back(shifted_coordinate(n, work, base_point, v));
  const auto& monomials = *MonomialSpace::get(2 * n, degree);
  Jet phi(n, work);
  for (std::size_t i = monomials.block_begin(2); i < monomials.size(); ++i) {
    const double coeff = uniform();
    Jet term = Jet::constant(n, work, coeff);
    for (int v = 0; v < 2 * n; ++v)
      for (int p = 0; p < monomials.exponents(i)[static_cast<std::size_t>(v)]; ++p)
        term = term * coords[static_cast<std::size_t>(v)];
    phi += term;
  }

  InitialData d;
  d.n = n;
  d.h = JetMatrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet levi = dz(dzbar(phi, j), i);
      for (auto& c : levi.coeffs()) c *= eps;
      Jet e = with_max_degree(levi, max_degree);
      if (i == j) e += Jet::constant(n, max_degree, 1.0);
      // d_i dbar_j of a real polynomial is Hermitian up to rounding; enforce it exactly.
      d.h(i, j) = std::move(e);
    }
  for (int i = 0; i < n; ++i) {
    for (auto& c : d.h(i, i).coeffs()) c = Complex(c.real(), 0.0);
    for (int j = i + 1; j < n; ++j) d.h(j, i) = conj(d.h(i, j));
  }
  d.base_point = std::move(base_point);
  d.polydisc_radius = 1.0;
  d.source = MetricSpec{"perturbed_flat",
                        {static_cast<double>(n), eps, static_cast<double>(seed), static_cast<double>(degree)}, {}};
  d.description = "perturbed flat C^" + std::to_string(n);
  validate_initial_data(d);
  return d;
}

InitialData product_metric(const std::vector<InitialData>& factors) {
  if (factors.empty()) throw InvalidInput("product metric needs at least one factor");
  int n = 0;
  for (const auto& f : factors) n += f.n;
  if (n > kMaxComplexDim) throw InvalidInput("product metric exceeds complex dimension 4");
  const int max_degree = factors.front().h(0, 0).max_degree();
  InitialData d;
  d.n = n;
  d.h = JetMatrix(n, Jet(n, max_degree));
  d.polydisc_radius = 1.0;
  MetricSpec spec{"product", {}, {}};
  int offset = 0;
  for (const auto& f : factors) {
    if (f.h(0, 0).max_degree() != max_degree) throw InvalidInput("product factors must share the degree cap");
    for (int i = 0; i < f.n; ++i)
      for (int j = 0; j < f.n; ++j) d.h(offset + i, offset + j) = embed(f.h(i, j), n, offset);
    d.base_point.insert(d.base_point.end(), f.base_point.begin(), f.base_point.end());
    d.polydisc_radius = std::min(d.polydisc_radius, f.polydisc_radius);
    if (f.source) spec.factors.push_back(*f.source);
    d.description += (offset ? " x " : "") + f.description;
    offset += f.n;
  }
  if (spec.factors.size() == factors.size()) d.source = spec;
  validate_initial_data(d);
  return d;
}

InitialData builtin_metric(const MetricSpec& spec, int max_degree, std::vector<double> base_point) {
  if (max_degree < 0) throw InvalidInput("degree cap must be nonnegative");
  const auto param = [&](std::size_t k, double fallback) { return k < spec.params.size() ? spec.params[k] : fallback; };
  if (spec.name == "product") {
    std::vector<InitialData> parts;
    std::size_t used = 0;
    for (const auto& f : spec.factors) {
      const int fn = f.complex_dimension();
      std::vector<double> slice;
      if (!base_point.empty()) {
        if (used + static_cast<std::size_t>(2 * fn) > base_point.size()) throw InvalidInput("base point too short");
        slice.assign(base_point.begin() + static_cast<std::ptrdiff_t>(used),
                     base_point.begin() + static_cast<std::ptrdiff_t>(used + static_cast<std::size_t>(2 * fn)));
      }
      used += static_cast<std::size_t>(2 * fn);
      parts.push_back(builtin_metric(f, max_degree, slice));
    }
    return product_metric(parts);
  }
  const int n = spec.complex_dimension();
  if (n > kMaxComplexDim) throw InvalidInput("complex dimension must be in 1..4");
  if (spec.name == "flat") {
    if (spec.params.size() != 1) throw InvalidInput("usage: flat:n");
    InitialData d = flat_metric(n, max_degree);
    d.base_point = origin_if_empty(std::move(base_point), n);
    return d;
  }
  if (spec.name == "fubini_study_chart") {
    if (spec.params.size() > 2) throw InvalidInput("usage: fubini_study_chart:n[,scale]");
    return fubini_study_chart(n, param(1, 1.0), max_degree, std::move(base_point));
  }
  if (spec.name == "perturbed_flat") {
    if (spec.params.size() < 3 || spec.params.size() > 4) throw InvalidInput("usage: perturbed_flat:n,eps,seed[,degree]");
    const double seed = spec.params[2];
    if (seed < 0 || seed != std::floor(seed)) throw InvalidInput("perturbed_flat: seed must be a nonnegative integer");
    return perturbed_flat(n, spec.params[1], static_cast<std::uint64_t>(seed), positive_int(param(3, 4.0), "degree"),
                          max_degree, std::move(base_point));
  }
  throw InvalidInput("unknown metric '" + spec.name + "'");
}

}  // namespace crf
