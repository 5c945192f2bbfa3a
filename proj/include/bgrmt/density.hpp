#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "bgrmt/errors.hpp"
#include "bgrmt/model.hpp"
#include "bgrmt/quadrature.hpp"

namespace bgrmt {

// One support interval together with the polynomial prefactor of the density
// on it. On the cut the density is
//   rho(lambda) = prefactor(lambda) * sqrt(|q(lambda)|) / pi
// where q is the monic polynomial with all cut endpoints as roots.
struct DensityCut {
  double lo = 0.0, hi = 0.0;
  std::array<double, 3> prefactor{};  // c0 + c1 x + c2 x^2

  double pre(double x) const {
    return prefactor[0] + x * (prefactor[1] + x * prefactor[2]);
  }
  double mid() const { return 0.5 * (lo + hi); }
  double rad() const { return 0.5 * (hi - lo); }
};

class SpectralDensity {
 public:
  SpectralDensity() = default;

  explicit SpectralDensity(std::vector<DensityCut> cuts) : cuts_(std::move(cuts)) {
    if (cuts_.empty()) throw std::invalid_argument("density needs at least one cut");
    std::sort(cuts_.begin(), cuts_.end(),
              [](const DensityCut& a, const DensityCut& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < cuts_.size(); ++i) {
      if (!(cuts_[i].lo < cuts_[i].hi))
        throw std::invalid_argument("cut must have lo < hi");
      if (i > 0 && cuts_[i].lo < cuts_[i - 1].hi - 1e-14)
        throw std::invalid_argument("cuts must not overlap");
      roots_.push_back(cuts_[i].lo);
      roots_.push_back(cuts_[i].hi);
    }
  }

  const std::vector<DensityCut>& cuts() const { return cuts_; }
  const std::vector<double>& roots() const { return roots_; }

  double support_lo() const { return cuts_.front().lo; }
  double support_hi() const { return cuts_.back().hi; }

  int find_cut(double x) const {
    for (std::size_t k = 0; k < cuts_.size(); ++k)
      if (x >= cuts_[k].lo && x <= cuts_[k].hi) return static_cast<int>(k);
    return -1;
  }

  // |q| restricted to the roots that are not this cut's own endpoints
  // (one instance of each is taken by the Chebyshev edge weight).
  double extra_factor(int cut, double x) const {
    const DensityCut& c = cuts_[static_cast<std::size_t>(cut)];
    bool skip_lo = true, skip_hi = true;
    double prod = 1.0;
    for (double r : roots_) {
      if (skip_lo && r == c.lo) { skip_lo = false; continue; }
      if (skip_hi && r == c.hi) { skip_hi = false; continue; }
      prod *= std::abs(x - r);
    }
    return prod;
  }

  double value(double x) const {
    const int k = find_cut(x);
    if (k < 0) return 0.0;
    const DensityCut& c = cuts_[static_cast<std::size_t>(k)];
    const double edge = (c.hi - x) * (x - c.lo);
    return c.pre(x) * std::sqrt(edge * extra_factor(k, x)) / M_PI;
  }
  double operator()(double x) const { return value(x); }

  // Distance from a complex point to the support (union of segments on R).
  double distance_to_support(std::complex<double> z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const DensityCut& c : cuts_) {
      const double dx = (z.real() < c.lo)   ? c.lo - z.real()
                        : (z.real() > c.hi) ? z.real() - c.hi
                                            : 0.0;
      best = std::min(best, std::hypot(dx, z.imag()));
    }
    return best;
  }

 private:
  std::vector<DensityCut> cuts_;
  std::vector<double> roots_;
};

// int_cut f(lambda) rho(lambda) dlambda with the cut's own edge factor
// absorbed into a Gauss-Chebyshev (2nd kind) rule of order n.
template <class F>
double integrate_cut(const SpectralDensity& d, int cut, F&& f, int n) {
  const DensityCut& c = d.cuts()[static_cast<std::size_t>(cut)];
  const double m = c.mid(), r = c.rad();
  const QuadRule& rule = gauss_chebyshev2_cached(n);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = m + r * rule.x[static_cast<std::size_t>(k)];
    acc += rule.w[static_cast<std::size_t>(k)] * c.pre(x) *
           std::sqrt(d.extra_factor(cut, x)) * f(x);
  }
  return acc * r * r / M_PI;
}

template <class F>
double integrate_density(const SpectralDensity& d, F&& f, int n = 64) {
  double acc = 0.0;
  for (std::size_t k = 0; k < d.cuts().size(); ++k)
    acc += integrate_cut(d, static_cast<int>(k), f, n);
  return acc;
}

// n-th moment of the density. The fixed 64-node rule is exact for generic
// supports; the order is doubled automatically until the value is stable,
// which only matters when two cuts (nearly) touch.
inline double density_moment(const SpectralDensity& d, int order) {
  if (order < 0 || order > 8)
    throw std::invalid_argument("density_moment: order must be in 0..8");
  auto f = [order](double x) {
    double v = 1.0;
    for (int i = 0; i < order; ++i) v *= x;
    return v;
  };
  double prev = integrate_density(d, f, 64);
  for (int n = 128; n <= 8192; n *= 2) {
    const double next = integrate_density(d, f, n);
    if (std::abs(next - prev) <= 1e-13 * std::max(1.0, std::abs(next)))
      return next;
    prev = next;
  }
  return prev;
}

inline Moments density_moments(const SpectralDensity& d) {
  Moments m;
  m.m1 = density_moment(d, 1);
  m.m2 = density_moment(d, 2);
  m.m3 = density_moment(d, 3);
  m.m4 = density_moment(d, 4);
  return m;
}

// rho >= -1e-12 at 512 Chebyshev-distributed points per cut.
inline void check_positivity(const SpectralDensity& d) {
  constexpr int kPoints = 512;
  for (const DensityCut& c : d.cuts()) {
    const double m = c.mid(), r = c.rad();
    for (int j = 1; j <= kPoints; ++j) {
      const double x = m + r * std::cos(j * M_PI / (kPoints + 1.0));
      if (d.value(x) < -1e-12)
        throw non_admissible_density("density negative inside support");
    }
  }
}

inline void check_normalized(const SpectralDensity& d, double tol = 1e-10) {
  const double m0 = density_moment(d, 0);
  if (std::abs(m0 - 1.0) > tol)
    throw non_admissible_density("density does not integrate to one");
}

namespace detail {

// theta parametrization of a cut: lambda = mid + rad cos(theta). In theta the
// edge sqrt factors are analytic, so graded panels only have to deal with the
// kernel singularity.
template <class Kernel>
auto integrate_cut_kernel(const SpectralDensity& d, int cut, Kernel&& kernel,
                          double split_x) {
  const DensityCut& c = d.cuts()[static_cast<std::size_t>(cut)];
  const double m = c.mid(), r = c.rad();
  auto f = [&](double theta) {
    const double x = m + r * std::cos(theta);
    const double s = std::sin(theta);
    return kernel(x) * (c.pre(x) * std::sqrt(d.extra_factor(cut, x)) * r * r *
                        s * s / M_PI);
  };
  // graded panels accumulate toward the kernel's nearest approach
  double ts;
  if (split_x <= c.lo)
    ts = M_PI;
  else if (split_x >= c.hi)
    ts = 0.0;
  else
    ts = std::acos(std::clamp((split_x - m) / r, -1.0, 1.0));
  auto acc = integrate_graded(f, 0.0, ts, ts);
  acc += integrate_graded(f, ts, M_PI, ts);
  return acc;
}

}  // namespace detail

// int log|x0 - lambda| rho(lambda) dlambda; x0 may lie inside a cut.
inline double log_kernel_integral(const SpectralDensity& d, double x0) {
  double acc = 0.0;
  for (std::size_t k = 0; k < d.cuts().size(); ++k) {
    auto kernel = [x0](double x) {
      return std::log(std::max(std::abs(x0 - x), 1e-300));
    };
    acc += detail::integrate_cut_kernel(d, static_cast<int>(k), kernel, x0);
  }
  return acc;
}

// Borel transform G(z) = (i/pi) int rho(lambda)/(z-lambda) dlambda.
inline std::complex<double> borel_transform(const SpectralDensity& d,
                                            std::complex<double> z) {
  if (d.distance_to_support(z) < 1e-8)
    throw near_singularity("borel_transform: z too close to the support");
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < d.cuts().size(); ++k) {
    auto kernel = [z](double x) { return 1.0 / (z - x); };
    acc += detail::integrate_cut_kernel(d, static_cast<int>(k), kernel,
                                        z.real());
  }
  return std::complex<double>(0.0, 1.0 / M_PI) * acc;
}

// Location of the density maximum strictly inside the given cut.
inline double density_argmax(const SpectralDensity& d, int cut) {
  const DensityCut& c = d.cuts()[static_cast<std::size_t>(cut)];
  const double m = c.mid(), r = c.rad();
  double best_x = m, best_v = -1.0;
  constexpr int kScan = 512;
  for (int j = 1; j <= kScan; ++j) {
    const double x = m + r * std::cos(j * M_PI / (kScan + 1.0));
    const double v = d.value(x);
    if (v > best_v) { best_v = v; best_x = x; }
  }
  // golden-section refinement around the best sample
  const double step = r * M_PI / (kScan + 1.0);
  double a = std::max(c.lo, best_x - step), b = std::min(c.hi, best_x + step);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = d.value(x1), f2 = d.value(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = d.value(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = d.value(x1);
    }
  }
  return 0.5 * (a + b);
}

// rho(-lambda) as a SpectralDensity.
inline SpectralDensity mirror(const SpectralDensity& d) {
  std::vector<DensityCut> cuts;
  for (const DensityCut& c : d.cuts()) {
    DensityCut m;
    m.lo = -c.hi;
    m.hi = -c.lo;
    m.prefactor = {c.prefactor[0], -c.prefactor[1], c.prefactor[2]};
    cuts.push_back(m);
  }
  return SpectralDensity(std::move(cuts));
}

}  // namespace bgrmt
