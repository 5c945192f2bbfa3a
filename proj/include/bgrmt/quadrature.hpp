#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bgrmt {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre nodes and weights on [-1,1], by Newton iteration on P_n.
inline QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadRule r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return r;
}

// Gauss-Chebyshev rule of the second kind:
//   int_{-1}^{1} f(x) sqrt(1-x^2) dx  ~=  sum_k w_k f(x_k)
inline QuadRule gauss_chebyshev2(int n) {
  if (n < 1) throw std::invalid_argument("gauss_chebyshev2: n must be >= 1");
  QuadRule r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  for (int k = 1; k <= n; ++k) {
    const double t = k * M_PI / (n + 1.0);
    r.x[k - 1] = std::cos(t);
    const double s = std::sin(t);
    r.w[k - 1] = M_PI / (n + 1.0) * s * s;
  }
  return r;
}

// node caches are per-rule-family and reference-stable (map nodes never move)
inline const QuadRule& gauss_legendre_cached(int n) {
  thread_local std::map<int, QuadRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}
inline const QuadRule& gauss_chebyshev2_cached(int n) {
  thread_local std::map<int, QuadRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_chebyshev2(n)).first;
  return it->second;
}

// Fixed-order Gauss-Legendre integral of f over [a,b].
template <class F>
auto integrate_gl(F&& f, double a, double b, int n) {
  const QuadRule& r = gauss_legendre_cached(n);
  const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
  auto acc = f(mid) * 0.0;
  for (int k = 0; k < n; ++k) acc += r.w[k] * f(mid + rad * r.x[k]);
  return acc * rad;
}

// Integral of f over [a,b] where f has an integrable singularity (log- or
// algebraic) at one endpoint `sing` (== a or b). Panels shrink geometrically
// toward the singular end; each panel is handled by Gauss-Legendre. Grading
// stops when further panels are no longer representable next to the endpoint.
template <class F>
auto integrate_graded(F&& f, double a, double b, double sing, int levels = 72,
                      int nodes = 16) {
  auto zero = f(0.5 * (a + b)) * 0.0;
  if (!(a < b)) return zero;
  const bool at_left = std::abs(sing - a) <= std::abs(sing - b);
  const double len = b - a;
  auto acc = zero;
  double frac = 1.0;
  for (int k = 0; k < levels; ++k) {
    const double next = frac * 0.5;
    double lo, hi;
    if (at_left) {
      lo = a + len * next;
      hi = a + len * frac;
    } else {
      lo = b - len * frac;
      hi = b - len * next;
    }
    if (!(lo < hi) || (at_left ? lo <= a : hi >= b)) break;
    acc += integrate_gl(f, lo, hi, nodes);
    frac = next;
  }
  // innermost sliver; skipped once its nodes would collapse onto the endpoint
  if (at_left) {
    if (a + len * frac * 1e-3 > a)
      acc += integrate_gl(f, a, a + len * frac, nodes);
  } else {
    if (b - len * frac * 1e-3 < b)
      acc += integrate_gl(f, b - len * frac, b, nodes);
  }
  return acc;
}

}  // namespace bgrmt
