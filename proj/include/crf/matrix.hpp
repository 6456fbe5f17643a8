#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "crf/errors.hpp"
#include "crf/tjet.hpp"

namespace crf {

inline Jet constant_like(const Jet& like, Complex value) {
  return Jet::constant(like.n(), like.max_degree(), value);
}

inline TJet constant_like(const TJet& like, Complex value) {
  TJet out(like.n(), like.max_degree(), like.order());
  out[0] = Jet::constant(like.n(), like.max_degree(), value);
  return out;
}

/// n x n matrix of jets or t-series. Used for g_ij and h_ij, whose
/// conjugate-transpose symmetry is checked by `hermitian_defect`.
template <class T>
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n * n)) {}
  HermitianMatrix(int n, const T& fill) : n_(n), entries_(static_cast<std::size_t>(n * n), fill) {}

  int n() const { return n_; }
  T& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i * n_ + j)]; }
  const T& operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i * n_ + j)]; }
  const std::vector<T>& entries() const { return entries_; }

  HermitianMatrix minor(int row, int col) const {
    HermitianMatrix m(n_ - 1);
    for (int i = 0, mi = 0; i < n_; ++i) {
      if (i == row) continue;
      for (int j = 0, mj = 0; j < n_; ++j) {
        if (j == col) continue;
        m(mi, mj++) = (*this)(i, j);
      }
      ++mi;
    }
    return m;
  }

 private:
  int n_ = 0;
  std::vector<T> entries_;
};

/// Cofactor expansion along the first row; n <= 4 keeps this cheap.
template <class T>
T determinant(const HermitianMatrix<T>& m) {
  const int n = m.n();
  if (n < 1) throw InvalidInput("determinant of an empty matrix");
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  T sum = m(0, 0) * determinant(m.minor(0, 0));
  for (int j = 1; j < n; ++j) {
    T term = m(0, j) * determinant(m.minor(0, j));
    if (j % 2 == 0)
      sum += term;
    else
      sum -= term;
  }
  return sum;
}

/// adj(m), so that m * adj(m) = det(m) * I.
template <class T>
HermitianMatrix<T> adjugate(const HermitianMatrix<T>& m) {
  const int n = m.n();
  HermitianMatrix<T> adj(n);
  if (n == 1) {
    adj(0, 0) = constant_like(m(0, 0), 1.0);
    return adj;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T c = determinant(m.minor(j, i));
      if ((i + j) % 2 == 1) c *= -1.0;
      adj(i, j) = std::move(c);
    }
  return adj;
}

template <class T, class F>
HermitianMatrix<T> map_entries(const HermitianMatrix<T>& m, F&& f) {
  HermitianMatrix<T> out(m.n());
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j) out(i, j) = f(m(i, j));
  return out;
}

inline double max_abs_diff_entry(const Jet& a, const Jet& b) { return max_abs_diff(a, b); }

inline double max_abs_diff_entry(const TJet& a, const TJet& b) {
  double m = 0.0;
  for (int k = 0; k <= std::min(a.order(), b.order()); ++k) m = std::max(m, max_abs_diff(a[k], b[k]));
  return m;
}

/// max over (i, j) of |m_ij - conj(m_ji)| through valid degrees.
template <class T>
double hermitian_defect(const HermitianMatrix<T>& m) {
  double worst = 0.0;
  for (int i = 0; i < m.n(); ++i)
    for (int j = i; j < m.n(); ++j) worst = std::max(worst, max_abs_diff_entry(m(i, j), conj(m(j, i))));
  return worst;
}

}  // namespace crf
