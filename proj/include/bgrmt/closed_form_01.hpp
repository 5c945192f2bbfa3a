#pragma once

#include <cmath>

#include "bgrmt/density.hpp"
#include "bgrmt/errors.hpp"

namespace bgrmt {

// Critical coupling of the (0,1) model, g = -4 sqrt(2).
inline const double kCritical01 = -4.0 * std::sqrt(2.0);

// Symmetric 1-cut solution: support [-b,b],
//   rho(x) = sqrt(b^2-x^2)/pi (2/b^2 - b^2 + 4x^2),
//   g  = 1/b^2 - 3 b^2 - (3/4) b^6,
//   m2 = b^2/4 + b^6/8,
// valid while b^4 < 2, i.e. g >= -4 sqrt(2).
struct OneCutSymmetric {
  double b = 0.0;
  double g = 0.0;
  double m2 = 0.0;
};

// Symmetric 2-cut solution: support [-b,-a] u [a,b],
//   rho(x) = (4/pi) |x| sqrt((b^2-x^2)(x^2-a^2)),
//   b = sqrt(-g+4 sqrt 2)/(2 sqrt 2), a = sqrt(-g-4 sqrt 2)/(2 sqrt 2),
//   m2 = -g/8,
// valid for g <= -4 sqrt(2).
struct TwoCutSymmetric {
  double a = 0.0;
  double b = 0.0;
  double g = 0.0;
  double m2 = 0.0;
};

inline double one_cut_coupling_of_b(double b) {
  const double b2 = b * b;
  return 1.0 / b2 - 3.0 * b2 - 0.75 * b2 * b2 * b2;
}

struct OneCutSolution01 {
  OneCutSymmetric params;
  SpectralDensity density;
};

struct TwoCutSolution01 {
  TwoCutSymmetric params;
  SpectralDensity density;
};

inline OneCutSolution01 solve_one_cut_01(double g) {
  if (g < kCritical01)
    throw out_of_branch("1-cut branch requires g >= -4 sqrt(2)");
  // g(b) is strictly decreasing on b > 0, so bisection on a bracket is exact.
  double lo = std::min(1.0, 1.0 / std::sqrt(std::abs(g) + 1.0)) * 1e-3;
  double hi = std::pow(2.0, 0.25);
  while (one_cut_coupling_of_b(lo) < g) lo *= 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (one_cut_coupling_of_b(mid) > g)
      lo = mid;
    else
      hi = mid;
  }
  double b = 0.5 * (lo + hi);
  // one Newton polish
  {
    const double b2 = b * b;
    const double deriv = -2.0 / (b2 * b) - 6.0 * b - 4.5 * b2 * b2 * b;
    const double corr = (one_cut_coupling_of_b(b) - g) / deriv;
    if (std::isfinite(corr) && std::abs(corr) < 1e-6) b -= corr;
  }
  b = std::min(b, std::pow(2.0, 0.25));
  const double b2 = b * b;
  OneCutSolution01 out;
  out.params = OneCutSymmetric{b, g, 0.25 * b2 + 0.125 * b2 * b2 * b2};
  out.density = SpectralDensity({DensityCut{-b, b, {2.0 / b2 - b2, 0.0, 4.0}}});
  return out;
}

inline TwoCutSolution01 solve_two_cut_01(double g) {
  if (g > kCritical01)
    throw out_of_branch("2-cut branch requires g <= -4 sqrt(2)");
  const double inv = 1.0 / (2.0 * std::sqrt(2.0));
  const double b = std::sqrt(-g + 4.0 * std::sqrt(2.0)) * inv;
  const double a = std::sqrt(std::max(-g - 4.0 * std::sqrt(2.0), 0.0)) * inv;
  TwoCutSolution01 out;
  out.params = TwoCutSymmetric{a, b, g, -g / 8.0};
  if (a < 1e-12) {
    // the gap closes: both cuts merge into rho = (4/pi) x^2 sqrt(b^2-x^2)
    out.density = SpectralDensity({DensityCut{-b, b, {0.0, 0.0, 4.0}}});
  } else {
    out.density = SpectralDensity({DensityCut{-b, -a, {0.0, -4.0, 0.0}},
                                   DensityCut{a, b, {0.0, 4.0, 0.0}}});
  }
  return out;
}

}  // namespace bgrmt
