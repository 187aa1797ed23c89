#pragma once

// Helpers shared by the unit tests: seeded random inputs and small oracles
// that do not go through the library code under test.

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "qgp/linalg.hpp"

namespace testing {

using qgp::Complex;
using qgp::Matrix;
using qgp::Vector;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240611ULL);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Matrix random_hermitian(std::size_t n, double scale = 1.0) {
  Matrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = uniform(-scale, scale);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex z(uniform(-scale, scale), uniform(-scale, scale));
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

inline Vector random_state(std::size_t n) {
  Vector v(n);
  double s = 0.0;
  for (auto& a : v) {
    a = Complex(uniform(-1, 1), uniform(-1, 1));
    s += std::norm(a);
  }
  for (auto& a : v) a /= std::sqrt(s);
  return v;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline Complex overlap(const Vector& a, const Vector& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Characteristic polynomial coefficients c_0..c_n of det(lambda I - H) by the
// Faddeev-LeVerrier recursion (c_n = 1).
inline std::vector<Complex> characteristic_polynomial(const Matrix& h) {
  const std::size_t n = h.dim();
  std::vector<Complex> c(n + 1);
  c[n] = 1.0;
  Matrix m(n);  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix next = h * m;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    m = next;
    Complex tr = 0.0;
    const Matrix hm = h * m;
    for (std::size_t i = 0; i < n; ++i) tr += hm(i, i);
    c[n - k] = -tr / static_cast<double>(k);
  }
  return c;
}

inline double eval_poly(const std::vector<Complex>& c, double x) {
  Complex s = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
  return s.real();
}

// Real roots of the characteristic polynomial by scanning [-bound, bound]
// for sign changes and bisecting each bracket.
inline std::vector<double> bracketed_roots(const Matrix& h, std::size_t scan = 20000) {
  const auto c = characteristic_polynomial(h);
  double bound = 0.0;
  for (std::size_t i = 0; i < h.dim(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < h.dim(); ++j) row += std::abs(h(i, j));
    bound = std::max(bound, row);
  }
  bound += 1e-3;
  std::vector<double> roots;
  double x0 = -bound, f0 = eval_poly(c, x0);
  for (std::size_t s = 1; s <= scan; ++s) {
    const double x1 = -bound + 2.0 * bound * static_cast<double>(s) / static_cast<double>(scan);
    const double f1 = eval_poly(c, x1);
    if (f0 == 0.0) roots.push_back(x0);
    else if (f0 * f1 < 0.0) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi), fm = eval_poly(c, mid);
        if (flo * fm <= 0.0) hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace testing
