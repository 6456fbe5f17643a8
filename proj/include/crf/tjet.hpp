#pragma once

#include <vector>

#include "crf/jet.hpp"

namespace crf {

/// Power series sum_{m=0}^{M} c_m(x) t^m with jet coefficients. Every
/// coefficient carries its own valid degree; series of different orders
/// combine to the smaller order.
class TJet {
 public:
  TJet() = default;
  /// Zero series of order M.
  TJet(int n, int max_degree, int order);
  explicit TJet(std::vector<Jet> coeffs);

  static TJet constant_in_t(const Jet& c0, int order);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  int n() const { return coeffs_.front().n(); }
  int max_degree() const { return coeffs_.front().max_degree(); }
  bool empty() const { return coeffs_.empty(); }

  const Jet& operator[](int m) const { return coeffs_[static_cast<std::size_t>(m)]; }
  Jet& operator[](int m) { return coeffs_[static_cast<std::size_t>(m)]; }
  const std::vector<Jet>& coeffs() const { return coeffs_; }

  std::vector<int> valid_degrees() const;
  /// Keeps orders 0..m.
  TJet truncated_order(int m) const;

  TJet& operator+=(const TJet& o);
  TJet& operator-=(const TJet& o);
  TJet& operator*=(Complex s);

 private:
  std::vector<Jet> coeffs_;
};

TJet operator+(TJet a, const TJet& b);
TJet operator-(TJet a, const TJet& b);
TJet operator-(TJet a);
TJet operator*(const TJet& a, const TJet& b);
TJet operator*(TJet a, Complex s);
TJet operator*(Complex s, TJet a);
/// Multiplication by a t-independent jet.
TJet operator*(const Jet& a, const TJet& b);

/// Coefficient m of a*b alone, without forming the whole product.
Jet product_coeff(const TJet& a, const TJet& b, int m);

Jet t_coeff(const TJet& a, int m);
/// int_0^t: order m moves to m+1 divided by m+1; the result has order M+1.
TJet t_integrate(const TJet& a);
/// d/dt: order m moves to m-1 times m; the result has order M-1.
TJet t_derive(const TJet& a);
/// Multiplication by t (order M+1).
TJet t_shift_up(const TJet& a);
/// Division by t; the constant coefficient is dropped (order M-1).
TJet t_shift_down(const TJet& a);

TJet exp(const TJet& a);
TJet reciprocal(const TJet& a);
/// Spatial partial derivative of every coefficient. Coefficients with no
/// valid degree left become exhausted instead of throwing.
TJet derivative(const TJet& a, int var);
TJet dz(const TJet& a, int k);
TJet dzbar(const TJet& a, int k);
TJet conj(const TJet& a);

}  // namespace crf
