#include "crf/tjet.hpp"

#include <algorithm>

#include "crf/errors.hpp"

namespace crf {

TJet::TJet(int n, int max_degree, int order) {
  if (order < 0) throw InvalidInput("t-series: negative order");
  coeffs_.assign(static_cast<std::size_t>(order) + 1, Jet(n, max_degree));
}

TJet::TJet(std::vector<Jet> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw InvalidInput("t-series: no coefficients");
  for (const auto& c : coeffs_) require_compatible(coeffs_.front(), c);
}

TJet TJet::constant_in_t(const Jet& c0, int order) {
  TJet out(c0.n(), c0.max_degree(), order);
  out[0] = c0;
  return out;
}

std::vector<int> TJet::valid_degrees() const {
  std::vector<int> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c.valid_degree());
  return out;
}

TJet TJet::truncated_order(int m) const {
  if (m > order()) throw InvalidInput("t-series: cannot truncate to a higher order");
  return TJet(std::vector<Jet>(coeffs_.begin(), coeffs_.begin() + m + 1));
}

TJet& TJet::operator+=(const TJet& o) {
  coeffs_.resize(static_cast<std::size_t>(std::min(order(), o.order())) + 1);
  for (int m = 0; m <= order(); ++m) (*this)[m] += o[m];
  return *this;
}

TJet& TJet::operator-=(const TJet& o) {
  coeffs_.resize(static_cast<std::size_t>(std::min(order(), o.order())) + 1);
  for (int m = 0; m <= order(); ++m) (*this)[m] -= o[m];
  return *this;
}

TJet& TJet::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

TJet operator+(TJet a, const TJet& b) { return a += b; }
TJet operator-(TJet a, const TJet& b) { return a -= b; }
TJet operator-(TJet a) { return a *= -1.0; }
TJet operator*(TJet a, Complex s) { return a *= s; }
TJet operator*(Complex s, TJet a) { return a *= s; }

TJet operator*(const Jet& a, const TJet& b) {
  std::vector<Jet> out;
  out.reserve(b.coeffs().size());
  for (const auto& c : b.coeffs()) out.push_back(a * c);
  return TJet(std::move(out));
}

Jet product_coeff(const TJet& a, const TJet& b, int m) {
  if (m > a.order() || m > b.order()) throw InvalidInput("t-series: coefficient beyond the series order");
  int valid = a[0].max_degree();
  for (int i = 0; i <= m; ++i) valid = std::min({valid, a[i].valid_degree(), b[m - i].valid_degree()});
  Jet sum(a[0].n(), a[0].max_degree(), valid);
  for (int i = 0; i <= m; ++i) multiply_accumulate(sum, a[i], b[m - i]);
  return sum;
}

TJet operator*(const TJet& a, const TJet& b) {
  const int order = std::min(a.order(), b.order());
  std::vector<Jet> out;
  out.reserve(static_cast<std::size_t>(order) + 1);
  for (int m = 0; m <= order; ++m) out.push_back(product_coeff(a, b, m));
  return TJet(std::move(out));
}

Jet t_coeff(const TJet& a, int m) {
  if (m < 0 || m > a.order()) throw InvalidInput("t-series: coefficient index out of range");
  return a[m];
}

TJet t_integrate(const TJet& a) {
  std::vector<Jet> out;
  out.reserve(static_cast<std::size_t>(a.order()) + 2);
  out.push_back(Jet(a.n(), a.max_degree()));
  for (int m = 0; m <= a.order(); ++m) out.push_back(a[m] * Complex(1.0 / (m + 1)));
  return TJet(std::move(out));
}

TJet t_derive(const TJet& a) {
  if (a.order() < 1) throw InvalidInput("t-series: derivative needs order >= 1");
  std::vector<Jet> out;
  for (int m = 1; m <= a.order(); ++m) out.push_back(a[m] * Complex(m));
  return TJet(std::move(out));
}

TJet t_shift_up(const TJet& a) {
  std::vector<Jet> out;
  out.push_back(Jet(a.n(), a.max_degree()));
  for (const auto& c : a.coeffs()) out.push_back(c);
  return TJet(std::move(out));
}

TJet t_shift_down(const TJet& a) {
  if (a.order() < 1) throw InvalidInput("t-series: shift down needs order >= 1");
  return TJet(std::vector<Jet>(a.coeffs().begin() + 1, a.coeffs().end()));
}

// F = exp(W) satisfies F' = W' F, i.e. m F_m = sum_{j=1}^{m} j W_j F_{m-j}.
TJet exp(const TJet& a) {
  std::vector<Jet> f;
  f.reserve(a.coeffs().size());
  f.push_back(exp(a[0]));
  for (int m = 1; m <= a.order(); ++m) {
    Jet sum;
    for (int j = 1; j <= m; ++j) {
      Jet term = a[j] * f[static_cast<std::size_t>(m - j)];
      term *= Complex(static_cast<double>(j) / m);
      if (j == 1)
        sum = std::move(term);
      else
        sum += term;
    }
    f.push_back(std::move(sum));
  }
  return TJet(std::move(f));
}

TJet reciprocal(const TJet& a) {
  std::vector<Jet> b;
  b.reserve(a.coeffs().size());
  b.push_back(reciprocal(a[0]));
  for (int m = 1; m <= a.order(); ++m) {
    Jet sum = a[1] * b[static_cast<std::size_t>(m - 1)];
    for (int j = 2; j <= m; ++j) sum += a[j] * b[static_cast<std::size_t>(m - j)];
    b.push_back(-(b[0] * sum));
  }
  return TJet(std::move(b));
}

namespace {

Jet derivative_or_exhausted(const Jet& a, int var) {
  if (a.valid_degree() < 1) return Jet::exhausted(a.n(), a.max_degree());
  return derivative(a, var);
}

}  // namespace

TJet derivative(const TJet& a, int var) {
  std::vector<Jet> out;
  for (const auto& c : a.coeffs()) out.push_back(derivative_or_exhausted(c, var));
  return TJet(std::move(out));
}

TJet dz(const TJet& a, int k) {
  return 0.5 * (derivative(a, 2 * k) - Complex(0, 1) * derivative(a, 2 * k + 1));
}

TJet dzbar(const TJet& a, int k) {
  return 0.5 * (derivative(a, 2 * k) + Complex(0, 1) * derivative(a, 2 * k + 1));
}

TJet conj(const TJet& a) {
  std::vector<Jet> out;
  for (const auto& c : a.coeffs()) out.push_back(conj(c));
  return TJet(std::move(out));
}

}  // namespace crf
