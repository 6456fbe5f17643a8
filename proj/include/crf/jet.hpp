#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace crf {

using Complex = std::complex<double>;

/// Up to four complex dimensions, i.e. eight real coordinates.
inline constexpr int kMaxComplexDim = 4;
inline constexpr int kMaxVars = 2 * kMaxComplexDim;

using Exponents = std::array<std::uint8_t, kMaxVars>;

/// Exponent vector over the real coordinates x1, y1, ..., xn, yn.
/// Variable 2k is x_{k+1}, variable 2k+1 is y_{k+1}.
struct MultiIndex {
  Exponents exponents{};
  int nvars = 0;

  int degree() const;
  bool operator==(const MultiIndex&) const = default;
};

/// Dense graded-lex enumeration of all monomials of degree <= max_degree in
/// `nvars` variables. Within one degree the order is lexicographic with
/// larger powers of earlier variables first (x1^2 < x1 y1 < x1 x2 < ...).
class MonomialSpace {
 public:
  MonomialSpace(int nvars, int max_degree);

  /// Shared, immutable instance; safe to call from several threads.
  static std::shared_ptr<const MonomialSpace> get(int nvars, int max_degree);

  int nvars() const { return nvars_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return exps_.size(); }
  /// Number of monomials of degree <= d (0 for d < 0).
  std::size_t size_upto(int d) const;
  /// First index of the degree-d block.
  std::size_t block_begin(int d) const { return offsets_[static_cast<std::size_t>(d)]; }

  const Exponents& exponents(std::size_t i) const { return exps_[i]; }
  int degree(std::size_t i) const { return degrees_[i]; }
  MultiIndex multi_index(std::size_t i) const;

  std::size_t index(const Exponents& e) const;
  std::size_t index(const MultiIndex& m) const { return index(m.exponents); }
  /// Index of the product monomial a*b of known total degree.
  std::size_t index_of_sum(const Exponents& a, const Exponents& b, int degree) const;

 private:
  std::size_t binom(int top, int bottom) const;

  int nvars_;
  int max_degree_;
  std::vector<Exponents> exps_;
  std::vector<int> degrees_;
  std::vector<std::size_t> offsets_;  // offsets_[d] = #monomials of degree < d
  std::vector<std::size_t> binom_;    // (top) x (nvars+1) table
  int binom_rows_ = 0;
};

/// Truncated Taylor polynomial in the 2n real coordinates of C^n, with
/// complex coefficients, stored densely in graded-lex order up to
/// max_degree. Coefficients above valid_degree are zero and carry no
/// information; valid_degree == -1 marks a jet with nothing left to trust.
class Jet {
 public:
  Jet() = default;
  /// Zero jet, valid through valid_degree (default: max_degree).
  Jet(int n, int max_degree) : Jet(n, max_degree, max_degree) {}
  Jet(int n, int max_degree, int valid_degree);

  static Jet constant(int n, int max_degree, Complex value);
  /// The coordinate function for real variable `var` (0 = x1, 1 = y1, ...).
  static Jet coordinate(int n, int max_degree, int var);
  /// z_k = x_k + i y_k (k zero-based).
  static Jet z(int n, int max_degree, int k);
  static Jet zbar(int n, int max_degree, int k);
  static Jet exhausted(int n, int max_degree);

  int n() const { return n_; }
  int nvars() const { return 2 * n_; }
  int max_degree() const { return max_degree_; }
  int valid_degree() const { return valid_degree_; }
  bool is_exhausted() const { return valid_degree_ < 0; }
  bool empty() const { return space_ == nullptr; }
  const MonomialSpace& space() const { return *space_; }

  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }
  Complex operator[](std::size_t i) const { return coeffs_[i]; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  Complex coeff(const MultiIndex& m) const;
  void set_coeff(const MultiIndex& m, Complex value);
  Complex constant_term() const { return coeffs_.empty() ? Complex{} : coeffs_[0]; }

  /// Lowers valid_degree to min(valid_degree, d) and zeroes everything above.
  Jet truncated(int d) const;
  void truncate(int d);
  bool is_zero() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(Complex s);

 private:
  friend Jet operator*(const Jet&, const Jet&);
  friend class JetKernels;

  int n_ = 0;
  int max_degree_ = -1;
  int valid_degree_ = -1;
  std::shared_ptr<const MonomialSpace> space_;
  std::vector<Complex> coeffs_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator-(Jet a);
Jet operator*(const Jet& a, const Jet& b);
/// acc += a * b; acc's valid degree drops to that of the product.
void multiply_accumulate(Jet& acc, const Jet& a, const Jet& b);
Jet operator*(Jet a, Complex s);
Jet operator*(Complex s, Jet a);

/// Throws InvalidInput unless both jets live in the same space.
void require_compatible(const Jet& a, const Jet& b);

Jet exp(const Jet& a);
/// Principal-branch logarithm; DegeneracyError on a zero constant term.
Jet log(const Jet& a);
/// 1/a; DegeneracyError on a zero constant term.
Jet reciprocal(const Jet& a);
/// Partial derivative in real variable `var`; DegeneracyError when the jet
/// has no trusted degree left to differentiate.
Jet derivative(const Jet& a, int var);
/// d/dz_k = (d/dx_k - i d/dy_k)/2 and d/dzbar_k = (d/dx_k + i d/dy_k)/2.
Jet dz(const Jet& a, int k);
Jet dzbar(const Jet& a, int k);
/// Pointwise complex conjugate as a function of the (real) coordinates.
Jet conj(const Jet& a);

Complex evaluate(const Jet& a, std::span<const double> point);
/// Evaluation at a point of the complexified polydisc.
Complex evaluate(const Jet& a, std::span<const Complex> point);

/// max |coefficient| over degrees <= upto (default: valid degree).
double max_abs(const Jet& a, int upto = -2);
/// max |a_k - b_k| through the smaller valid degree.
double max_abs_diff(const Jet& a, const Jet& b);
bool approx_equal(const Jet& a, const Jet& b, double tol);

/// Same polynomial in a space with a different degree cap (coefficients
/// above the new cap are dropped).
Jet with_max_degree(const Jet& a, int max_degree);
/// Embeds a jet in fewer complex variables into C^n_total, its variables
/// becoming x_{offset+1}, y_{offset+1}, ...
Jet embed(const Jet& a, int n_total, int complex_offset);

/// Human-readable polynomial, for diagnostics and tests.
std::string to_string(const Jet& a, double drop_below = 0.0);

}  // namespace crf
