#include "crf/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include "crf/errors.hpp"

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace crf {

#ifdef __GLIBC__
namespace {
// Coefficient buffers run to several hundred kilobytes and are freed as fast
// as they are made; served by mmap, each one costs a round of page faults.
[[maybe_unused]] const bool kAllocatorTuned = [] {
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
  return true;
}();
}  // namespace
#endif

int MultiIndex::degree() const {
  int d = 0;
  for (int k = 0; k < nvars; ++k) d += exponents[static_cast<std::size_t>(k)];
  return d;
}

namespace {

// Appends all exponent vectors of exact degree `remaining` over variables
// [var, nvars) in lexicographic order, larger powers first.
void enumerate_degree(int nvars, int var, int remaining, Exponents& cur, std::vector<Exponents>& out) {
  if (var == nvars - 1) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(remaining);
    out.push_back(cur);
    cur[static_cast<std::size_t>(var)] = 0;
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
    enumerate_degree(nvars, var + 1, remaining - e, cur, out);
  }
  cur[static_cast<std::size_t>(var)] = 0;
}

}  // namespace

MonomialSpace::MonomialSpace(int nvars, int max_degree) : nvars_(nvars), max_degree_(max_degree) {
  if (nvars < 1 || nvars > kMaxVars) throw InvalidInput("monomial space: unsupported variable count");
  if (max_degree < 0 || max_degree > 200) throw InvalidInput("monomial space: degree out of range");

  binom_rows_ = 2 * max_degree + nvars + 2;
  const auto cols = static_cast<std::size_t>(nvars + 1);
  binom_.assign(static_cast<std::size_t>(binom_rows_) * cols, 0);
  for (int top = 0; top < binom_rows_; ++top) {
    for (int bottom = 0; bottom <= std::min(top, nvars); ++bottom) {
      std::size_t v = 1;
      if (bottom > 0 && bottom < top) {
        v = binom_[static_cast<std::size_t>(top - 1) * cols + static_cast<std::size_t>(bottom - 1)];
        if (bottom <= top - 1) v += binom_[static_cast<std::size_t>(top - 1) * cols + static_cast<std::size_t>(bottom)];
      }
      binom_[static_cast<std::size_t>(top) * cols + static_cast<std::size_t>(bottom)] = v;
    }
  }

  offsets_.assign(static_cast<std::size_t>(max_degree) + 2, 0);
  Exponents cur{};
  for (int d = 0; d <= max_degree; ++d) {
    offsets_[static_cast<std::size_t>(d)] = exps_.size();
    enumerate_degree(nvars, 0, d, cur, exps_);
  }
  offsets_[static_cast<std::size_t>(max_degree) + 1] = exps_.size();
  degrees_.resize(exps_.size());
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    int d = 0;
    for (int k = 0; k < nvars; ++k) d += exps_[i][static_cast<std::size_t>(k)];
    degrees_[i] = d;
  }
}

std::shared_ptr<const MonomialSpace> MonomialSpace::get(int nvars, int max_degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialSpace>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{nvars, max_degree}];
  if (!slot) slot = std::make_shared<const MonomialSpace>(nvars, max_degree);
  return slot;
}

std::size_t MonomialSpace::size_upto(int d) const {
  if (d < 0) return 0;
  return offsets_[static_cast<std::size_t>(std::min(d, max_degree_)) + 1];
}

MultiIndex MonomialSpace::multi_index(std::size_t i) const { return MultiIndex{exps_[i], nvars_}; }

std::size_t MonomialSpace::binom(int top, int bottom) const {
  return binom_[static_cast<std::size_t>(top) * static_cast<std::size_t>(nvars_ + 1) + static_cast<std::size_t>(bottom)];
}

std::size_t MonomialSpace::index(const Exponents& e) const {
  int d = 0;
  for (int k = 0; k < nvars_; ++k) d += e[static_cast<std::size_t>(k)];
  for (int k = nvars_; k < kMaxVars; ++k)
    if (e[static_cast<std::size_t>(k)] != 0) throw InvalidInput("multi-index has too many variables");
  if (d > max_degree_) throw InvalidInput("multi-index exceeds the degree cap");
  static const Exponents zero{};
  return index_of_sum(e, zero, d);
}

// Rank within the degree block: monomials before e are those whose first
// differing exponent is larger. Summing over positions gives binomials.
std::size_t MonomialSpace::index_of_sum(const Exponents& a, const Exponents& b, int degree) const {
  std::size_t idx = offsets_[static_cast<std::size_t>(degree)];
  int rest = degree;
  for (int k = 0; k + 1 < nvars_; ++k) {
    const int e = a[static_cast<std::size_t>(k)] + b[static_cast<std::size_t>(k)];
    const int after = rest - e;
    const int tail_vars = nvars_ - 1 - k;
    if (after >= 1) idx += binom(after - 1 + tail_vars, tail_vars);
    rest = after;
  }
  return idx;
}

// ---------------------------------------------------------------------------

class JetKernels {
 public:
  // out[degree da+db block] += scale * a[da block] * b[db block]
  static void accumulate_block(const MonomialSpace& sp, const Complex* a, int da, const Complex* b, int db,
                               Complex* out, Complex scale) {
    const std::size_t a0 = sp.block_begin(da), a1 = sp.block_begin(da + 1);
    const std::size_t b0 = sp.block_begin(db), b1 = sp.block_begin(db + 1);
    const int d = da + db;
    const double sr = scale.real(), si = scale.imag();
    for (std::size_t ia = a0; ia < a1; ++ia) {
      const double ar0 = a[ia].real(), ai0 = a[ia].imag();
      if (ar0 == 0.0 && ai0 == 0.0) continue;
      const double ar = ar0 * sr - ai0 * si;
      const double ai = ar0 * si + ai0 * sr;
      const Exponents& ea = sp.exponents(ia);
      for (std::size_t ib = b0; ib < b1; ++ib) {
        const double br = b[ib].real(), bi = b[ib].imag();
        if (br == 0.0 && bi == 0.0) continue;
        const std::size_t k = sp.index_of_sum(ea, sp.exponents(ib), d);
        out[k] += Complex(ar * br - ai * bi, ar * bi + ai * br);
      }
    }
  }

  static std::vector<bool> nonzero_blocks(const Jet& a, int upto) {
    std::vector<bool> nz(static_cast<std::size_t>(upto + 1), false);
    const auto& sp = a.space();
    for (int d = 0; d <= upto; ++d)
      for (std::size_t i = sp.block_begin(d); i < sp.block_begin(d + 1); ++i)
        if (a.coeffs_[i] != Complex{}) {
          nz[static_cast<std::size_t>(d)] = true;
          break;
        }
    return nz;
  }

  static Jet like(const Jet& a, int valid) {
    Jet out(a.n_, a.max_degree_);
    out.valid_degree_ = valid;
    return out;
  }
};

Jet::Jet(int n, int max_degree, int valid_degree)
    : n_(n), max_degree_(max_degree), valid_degree_(std::min(valid_degree, max_degree)) {
  if (n < 1 || n > kMaxComplexDim) throw InvalidInput("jet: complex dimension must be in 1..4");
  space_ = MonomialSpace::get(2 * n, max_degree);
  coeffs_.assign(space_->size(), Complex{});
}

Jet Jet::constant(int n, int max_degree, Complex value) {
  Jet j(n, max_degree);
  j.coeffs_[0] = value;
  return j;
}

Jet Jet::coordinate(int n, int max_degree, int var) {
  Jet j(n, max_degree);
  if (var < 0 || var >= 2 * n) throw InvalidInput("jet: coordinate index out of range");
  if (max_degree >= 1) {
    Exponents e{};
    e[static_cast<std::size_t>(var)] = 1;
    j.coeffs_[j.space_->index(e)] = 1.0;
  }
  return j;
}

Jet Jet::z(int n, int max_degree, int k) {
  return coordinate(n, max_degree, 2 * k) + Complex(0, 1) * coordinate(n, max_degree, 2 * k + 1);
}

Jet Jet::zbar(int n, int max_degree, int k) {
  return coordinate(n, max_degree, 2 * k) - Complex(0, 1) * coordinate(n, max_degree, 2 * k + 1);
}

Jet Jet::exhausted(int n, int max_degree) {
  Jet j(n, max_degree);
  j.valid_degree_ = -1;
  return j;
}

Complex Jet::coeff(const MultiIndex& m) const {
  const int d = m.degree();
  if (d > max_degree_) return {};
  return coeffs_[space_->index(m)];
}

void Jet::set_coeff(const MultiIndex& m, Complex value) {
  if (m.degree() > valid_degree_) throw InvalidInput("jet: coefficient beyond the valid degree");
  coeffs_[space_->index(m)] = value;
}

void Jet::truncate(int d) {
  if (d >= valid_degree_) return;
  const std::size_t from = space_->size_upto(d), to = space_->size_upto(valid_degree_);
  valid_degree_ = d;
  std::fill(coeffs_.begin() + static_cast<std::ptrdiff_t>(from), coeffs_.begin() + static_cast<std::ptrdiff_t>(to), Complex{});
}

Jet Jet::truncated(int d) const {
  Jet out = *this;
  out.truncate(d);
  return out;
}

bool Jet::is_zero() const {
  const std::size_t lim = valid_degree_ < 0 ? 0 : space_->size_upto(valid_degree_);
  return std::all_of(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lim), [](Complex c) { return c == Complex{}; });
}

void require_compatible(const Jet& a, const Jet& b) {
  if (a.empty() || b.empty()) throw InvalidInput("jet: operation on an empty jet");
  if (a.n() != b.n() || a.max_degree() != b.max_degree())
    throw InvalidInput("jet: dimension or degree-cap mismatch");
}

Jet& Jet::operator+=(const Jet& o) {
  require_compatible(*this, o);
  const std::size_t old_lim = space_->size_upto(valid_degree_);
  valid_degree_ = std::min(valid_degree_, o.valid_degree_);
  const std::size_t lim = space_->size_upto(valid_degree_);
  for (std::size_t i = 0; i < lim; ++i) coeffs_[i] += o.coeffs_[i];
  std::fill(coeffs_.begin() + static_cast<std::ptrdiff_t>(lim), coeffs_.begin() + static_cast<std::ptrdiff_t>(old_lim), Complex{});
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  require_compatible(*this, o);
  const std::size_t old_lim = space_->size_upto(valid_degree_);
  valid_degree_ = std::min(valid_degree_, o.valid_degree_);
  const std::size_t lim = space_->size_upto(valid_degree_);
  for (std::size_t i = 0; i < lim; ++i) coeffs_[i] -= o.coeffs_[i];
  std::fill(coeffs_.begin() + static_cast<std::ptrdiff_t>(lim), coeffs_.begin() + static_cast<std::ptrdiff_t>(old_lim), Complex{});
  return *this;
}

Jet& Jet::operator*=(Complex s) {
  const std::size_t lim = valid_degree_ < 0 ? 0 : space_->size_upto(valid_degree_);
  if (s.imag() == 0.0) {
    const double r = s.real();
    for (std::size_t i = 0; i < lim; ++i) coeffs_[i] = Complex(coeffs_[i].real() * r, coeffs_[i].imag() * r);
  } else {
    const double sr = s.real(), si = s.imag();
    for (std::size_t i = 0; i < lim; ++i) {
      const double ar = coeffs_[i].real(), ai = coeffs_[i].imag();
      coeffs_[i] = Complex(ar * sr - ai * si, ar * si + ai * sr);
    }
  }
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator-(Jet a) { return a *= -1.0; }
Jet operator*(Jet a, Complex s) { return a *= s; }
Jet operator*(Complex s, Jet a) { return a *= s; }

Jet operator*(const Jet& a, const Jet& b) {
  require_compatible(a, b);
  Jet out = JetKernels::like(a, std::min(a.valid_degree(), b.valid_degree()));
  multiply_accumulate(out, a, b);
  return out;
}

void multiply_accumulate(Jet& acc, const Jet& a, const Jet& b) {
  require_compatible(a, b);
  require_compatible(acc, a);
  const int valid = std::min({acc.valid_degree(), a.valid_degree(), b.valid_degree()});
  acc.truncate(valid);
  if (valid < 0) return;
  const auto& sp = a.space();
  const std::vector<bool> na = JetKernels::nonzero_blocks(a, valid), nb = JetKernels::nonzero_blocks(b, valid);
  for (int da = 0; da <= valid; ++da) {
    if (!na[static_cast<std::size_t>(da)]) continue;
    for (int db = 0; db + da <= valid; ++db)
      if (nb[static_cast<std::size_t>(db)])
        JetKernels::accumulate_block(sp, a.coeffs().data(), da, b.coeffs().data(), db, acc.coeffs().data(), 1.0);
  }
}

// exp, log and reciprocal use the Euler-operator recurrences on homogeneous
// components (E = sum_k x_k d/dx_k multiplies the degree-d part by d), so
// each costs about one truncated product.

Jet exp(const Jet& a) {
  if (a.empty()) throw InvalidInput("jet exp: empty jet");
  const int valid = a.valid_degree();
  Jet out = JetKernels::like(a, valid);
  if (valid < 0) return out;
  const auto& sp = a.space();
  out[0] = std::exp(a[0]);
  for (int k = 1; k <= valid; ++k)
    for (int j = 1; j <= k; ++j)
      JetKernels::accumulate_block(sp, a.coeffs().data(), j, out.coeffs().data(), k - j, out.coeffs().data(),
                                   static_cast<double>(j) / k);
  return out;
}

Jet log(const Jet& a) {
  if (a.empty()) throw InvalidInput("jet log: empty jet");
  const int valid = a.valid_degree();
  Jet out = JetKernels::like(a, valid);
  if (valid < 0) return out;
  const Complex a0 = a[0];
  if (a0 == Complex{}) throw DegeneracyError("jet log: zero constant term");
  const auto& sp = a.space();
  out[0] = std::log(a0);
  for (int k = 1; k <= valid; ++k) {
    const std::size_t b0 = sp.block_begin(k), b1 = sp.block_begin(k + 1);
    for (int j = 1; j < k; ++j)
      JetKernels::accumulate_block(sp, out.coeffs().data(), j, a.coeffs().data(), k - j, out.coeffs().data(),
                                   -static_cast<double>(j) / k);
    for (std::size_t i = b0; i < b1; ++i) out[i] = (a[i] + out[i]) / a0;
  }
  return out;
}

Jet reciprocal(const Jet& a) {
  if (a.empty()) throw InvalidInput("jet reciprocal: empty jet");
  const int valid = a.valid_degree();
  Jet out = JetKernels::like(a, valid);
  if (valid < 0) return out;
  const Complex a0 = a[0];
  if (a0 == Complex{}) throw DegeneracyError("jet reciprocal: zero constant term");
  const auto& sp = a.space();
  out[0] = 1.0 / a0;
  for (int k = 1; k <= valid; ++k) {
    const std::size_t b0 = sp.block_begin(k), b1 = sp.block_begin(k + 1);
    for (int j = 1; j <= k; ++j)
      JetKernels::accumulate_block(sp, a.coeffs().data(), j, out.coeffs().data(), k - j, out.coeffs().data(), 1.0);
    for (std::size_t i = b0; i < b1; ++i) out[i] = -out[i] / a0;
  }
  return out;
}

Jet derivative(const Jet& a, int var) {
  if (a.empty()) throw InvalidInput("jet derivative: empty jet");
  if (var < 0 || var >= a.nvars()) throw InvalidInput("jet derivative: coordinate index out of range");
  if (a.valid_degree() < 1)
    throw DegeneracyError("jet derivative: no valid degree left (valid_degree " + std::to_string(a.valid_degree()) + ")");
  Jet out = JetKernels::like(a, a.valid_degree() - 1);
  const auto& sp = a.space();
  const std::size_t lim = sp.size_upto(a.valid_degree());
  const auto v = static_cast<std::size_t>(var);
  for (std::size_t i = sp.block_begin(1); i < lim; ++i) {
    const Exponents& e = sp.exponents(i);
    if (e[v] == 0 || a[i] == Complex{}) continue;
    Exponents lower = e;
    --lower[v];
    out[sp.index_of_sum(lower, Exponents{}, sp.degree(i) - 1)] += static_cast<double>(e[v]) * a[i];
  }
  return out;
}

Jet dz(const Jet& a, int k) {
  return 0.5 * (derivative(a, 2 * k) - Complex(0, 1) * derivative(a, 2 * k + 1));
}

Jet dzbar(const Jet& a, int k) {
  return 0.5 * (derivative(a, 2 * k) + Complex(0, 1) * derivative(a, 2 * k + 1));
}

Jet conj(const Jet& a) {
  Jet out = a;
  for (auto& c : out.coeffs()) c = std::conj(c);
  return out;
}

Complex evaluate(const Jet& a, std::span<const Complex> point) {
  if (static_cast<int>(point.size()) != a.nvars()) throw InvalidInput("jet evaluate: point has wrong dimension");
  const int valid = a.valid_degree();
  if (valid < 0) return {};
  const auto& sp = a.space();
  const std::size_t deg = static_cast<std::size_t>(valid) + 1;
  std::vector<Complex> powers(static_cast<std::size_t>(a.nvars()) * deg);
  for (std::size_t v = 0; v < point.size(); ++v) {
    powers[v * deg] = 1.0;
    for (std::size_t k = 1; k < deg; ++k) powers[v * deg + k] = powers[v * deg + k - 1] * point[v];
  }
  Complex sum{};
  const std::size_t lim = sp.size_upto(valid);
  for (std::size_t i = 0; i < lim; ++i) {
    if (a[i] == Complex{}) continue;
    Complex term = a[i];
    const Exponents& e = sp.exponents(i);
    for (std::size_t v = 0; v < point.size(); ++v)
      if (e[v] != 0) term *= powers[v * deg + e[v]];
    sum += term;
  }
  return sum;
}

Complex evaluate(const Jet& a, std::span<const double> point) {
  std::vector<Complex> p(point.begin(), point.end());
  return evaluate(a, std::span<const Complex>(p));
}

double max_abs(const Jet& a, int upto) {
  if (upto == -2) upto = a.valid_degree();
  const std::size_t lim = a.space().size_upto(std::min(upto, a.max_degree()));
  double m2 = 0.0;
  for (std::size_t i = 0; i < lim; ++i) m2 = std::max(m2, std::norm(a[i]));
  if (std::isfinite(m2)) return std::sqrt(m2);
  double m = 0.0;
  for (std::size_t i = 0; i < lim; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double max_abs_diff(const Jet& a, const Jet& b) {
  require_compatible(a, b);
  const std::size_t lim = a.space().size_upto(std::min(a.valid_degree(), b.valid_degree()));
  double m2 = 0.0;
  for (std::size_t i = 0; i < lim; ++i) m2 = std::max(m2, std::norm(a[i] - b[i]));
  if (std::isfinite(m2)) return std::sqrt(m2);
  double m = 0.0;
  for (std::size_t i = 0; i < lim; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool approx_equal(const Jet& a, const Jet& b, double tol) { return max_abs_diff(a, b) <= tol; }

Jet with_max_degree(const Jet& a, int max_degree) {
  Jet out(a.n(), max_degree);
  const auto& src = a.space();
  const auto& dst = out.space();
  const int keep = std::min(a.valid_degree(), max_degree);
  for (std::size_t i = 0; i < src.size_upto(keep); ++i) out[dst.index(src.exponents(i))] = a[i];
  out.truncate(a.valid_degree() < max_degree ? a.valid_degree() : max_degree);
  return out;
}

Jet embed(const Jet& a, int n_total, int complex_offset) {
  if (complex_offset < 0 || complex_offset + a.n() > n_total) throw InvalidInput("jet embed: variables out of range");
  Jet out(n_total, a.max_degree());
  const auto& src = a.space();
  const auto& dst = out.space();
  for (std::size_t i = 0; i < src.size_upto(a.valid_degree()); ++i) {
    Exponents e{};
    for (int v = 0; v < a.nvars(); ++v)
      e[static_cast<std::size_t>(2 * complex_offset + v)] = src.exponents(i)[static_cast<std::size_t>(v)];
    out[dst.index(e)] = a[i];
  }
  out.truncate(a.valid_degree());
  return out;
}

std::string to_string(const Jet& a, double drop_below) {
  static const char* names[] = {"x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4"};
  std::ostringstream os;
  bool first = true;
  const auto& sp = a.space();
  for (std::size_t i = 0; i < sp.size_upto(a.valid_degree()); ++i) {
    if (std::abs(a[i]) <= drop_below) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << a[i].real();
    if (a[i].imag() != 0.0) os << (a[i].imag() < 0 ? "-" : "+") << std::abs(a[i].imag()) << "i";
    os << ")";
    const Exponents& e = sp.exponents(i);
    for (int v = 0; v < a.nvars(); ++v) {
      const int p = e[static_cast<std::size_t>(v)];
      if (p == 1) os << "*" << names[v];
      if (p > 1) os << "*" << names[v] << "^" << p;
    }
  }
  if (first) os << "0";
  os << "  [valid " << a.valid_degree() << "/" << a.max_degree() << "]";
  return os.str();
}

}  // namespace crf
