#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <variant>

#include "bgrmt/density.hpp"
#include "bgrmt/errors.hpp"
#include "bgrmt/model.hpp"
#include "bgrmt/quadrature.hpp"

namespace bgrmt {

// W(x) = w1 x + w2 x^2 + w3 x^3 + w4 x^4 with w4 > 0 (w0 is irrelevant).
struct QuarticPotential {
  double w1 = 0.0, w2 = 0.0, w3 = 0.0, w4 = 1.0;

  double eval(double x) const { return x * (w1 + x * (w2 + x * (w3 + x * w4))); }
  double deriv(double x) const {
    return w1 + x * (2.0 * w2 + x * (3.0 * w3 + x * 4.0 * w4));
  }
};

inline void check_potential(const QuarticPotential& w) {
  if (!(w.w4 > 0.0)) throw std::invalid_argument("quartic potential needs w4 > 0");
}

struct OneCutSupport {
  double a = 0.0, b = 0.0;  // a < b

  double s1() const { return a + b; }
  double s2() const { return a * b; }
};

inline void check_support(const OneCutSupport& s) {
  if (!(s.a < s.b)) throw std::invalid_argument("1-cut support needs a < b");
}

struct TwoCutSupport {
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;  // a1 < b1 < a2 < b2

  double s1() const { return a1 + b1 + a2 + b2; }
  double s2() const {
    return a1 * b1 + a2 * b2 + a1 * a2 + b1 * b2 + a1 * b2 + b1 * a2;
  }
  double s3() const {
    return a1 * b1 * a2 + a1 * b1 * b2 + a1 * a2 * b2 + b1 * a2 * b2;
  }
  double s4() const { return a1 * b1 * a2 * b2; }

  double q(double x) const { return (x - a1) * (x - b1) * (x - a2) * (x - b2); }
};

inline void check_support(const TwoCutSupport& s) {
  if (!(s.a1 < s.b1 && s.b1 < s.a2 && s.a2 < s.b2))
    throw std::invalid_argument("2-cut support needs a1 < b1 < a2 < b2");
}

// Coefficients of sqrt(q(z)) = z (1 - sum_n C_n z^-n) for q = (z-a)(z-b).
// C5..C7 extend the standard list; they enter the moment relations.
inline std::array<double, 7> one_cut_coefficients(const OneCutSupport& s) {
  const double S1 = s.s1(), S2 = s.s2();
  const double S1_2 = S1 * S1, S1_3 = S1_2 * S1, S1_4 = S1_2 * S1_2;
  const double S1_5 = S1_4 * S1, S1_6 = S1_4 * S1_2, S1_7 = S1_4 * S1_3;
  const double S2_2 = S2 * S2, S2_3 = S2_2 * S2;
  return {
      S1 / 2.0,
      (S1_2 - 4.0 * S2) / 8.0,
      (S1_3 - 4.0 * S1 * S2) / 16.0,
      (5.0 * S1_4 - 24.0 * S1_2 * S2 + 16.0 * S2_2) / 128.0,
      (7.0 * S1_5 - 40.0 * S1_3 * S2 + 48.0 * S1 * S2_2) / 256.0,
      (21.0 * S1_6 - 140.0 * S1_4 * S2 + 240.0 * S1_2 * S2_2 - 64.0 * S2_3) /
          1024.0,
      (33.0 * S1_7 - 252.0 * S1_5 * S2 + 560.0 * S1_3 * S2_2 -
       320.0 * S1 * S2_3) /
          2048.0,
  };
}

// Coefficients of sqrt(q(z)) = z^2 (1 - sum_n c_n z^-n) for the 2-cut quartic.
inline std::array<double, 7> two_cut_coefficients(const TwoCutSupport& s) {
  const double s1 = s.s1(), s2 = s.s2(), s3 = s.s3(), s4 = s.s4();
  const double s1_2 = s1 * s1, s1_3 = s1_2 * s1, s1_4 = s1_2 * s1_2;
  const double s1_5 = s1_4 * s1, s1_6 = s1_4 * s1_2, s1_7 = s1_4 * s1_3;
  const double s2_2 = s2 * s2, s2_3 = s2_2 * s2;
  return {
      s1 / 2.0,
      (s1_2 - 4.0 * s2) / 8.0,
      (s1_3 - 4.0 * s1 * s2 + 8.0 * s3) / 16.0,
      (5.0 * s1_4 - 24.0 * s1_2 * s2 + 32.0 * s1 * s3 + 16.0 * s2_2 -
       64.0 * s4) /
          128.0,
      (7.0 * s1_5 - 40.0 * s1_3 * s2 + 48.0 * s1_2 * s3 + 48.0 * s1 * s2_2 -
       64.0 * s1 * s4 - 64.0 * s2 * s3) /
          256.0,
      (21.0 * s1_6 - 140.0 * s1_4 * s2 + 160.0 * s1_3 * s3 +
       240.0 * s1_2 * s2_2 - 192.0 * s1_2 * s4 - 384.0 * s1 * s2 * s3 -
       64.0 * s2_3 + 256.0 * s2 * s4 + 128.0 * s3 * s3) /
          1024.0,
      (33.0 * s1_7 - 252.0 * s1_5 * s2 + 280.0 * s1_4 * s3 +
       560.0 * s1_3 * s2_2 - 320.0 * s1_3 * s4 - 960.0 * s1_2 * s2 * s3 -
       320.0 * s1 * s2_3 + 768.0 * s1 * s2 * s4 + 384.0 * s1 * s3 * s3 +
       384.0 * s2_2 * s3 - 512.0 * s3 * s4) /
          2048.0,
  };
}

inline SpectralDensity build_one_cut_density(const QuarticPotential& w,
                                             const OneCutSupport& s) {
  check_potential(w);
  check_support(s);
  const double S1 = s.s1(), S2 = s.s2();
  DensityCut c;
  c.lo = s.a;
  c.hi = s.b;
  c.prefactor = {
      w.w2 + 0.75 * S1 * w.w3 + 0.25 * (3.0 * S1 * S1 - 4.0 * S2) * w.w4,
      0.5 * (3.0 * w.w3 + 2.0 * w.w4 * S1),
      2.0 * w.w4,
  };
  SpectralDensity d({c});
  check_positivity(d);
  return d;
}

inline SpectralDensity build_two_cut_density(const QuarticPotential& w,
                                             const TwoCutSupport& s) {
  check_potential(w);
  check_support(s);
  const double base = 1.5 * w.w3 + s.s1() * w.w4;
  const double lin = 2.0 * w.w4;
  SpectralDensity d({DensityCut{s.a1, s.b1, {-base, -lin, 0.0}},
                     DensityCut{s.a2, s.b2, {base, lin, 0.0}}});
  check_positivity(d);
  return d;
}

namespace detail {

// shared pieces of the 1-cut asymptotic expansion
struct OneCutExpansion {
  std::array<double, 7> C;
  double B;  // (3 w3 + 4 C1 w4)/2
  double A;  // (4 (C1^2+C2) w4 + 3 C1 w3 + 2 w2)/2

  OneCutExpansion(const QuarticPotential& w, const OneCutSupport& s)
      : C(one_cut_coefficients(s)) {
    B = 0.5 * (3.0 * w.w3 + 4.0 * C[0] * w.w4);
    A = 0.5 * (4.0 * (C[0] * C[0] + C[1]) * w.w4 + 3.0 * C[0] * w.w3 +
               2.0 * w.w2);
  }
};

}  // namespace detail

// Consistency conditions on a 1-cut support; both vanish at a valid support.
inline std::pair<double, double> one_cut_boundary_residuals(
    const QuarticPotential& w, const OneCutSupport& s) {
  check_potential(w);
  check_support(s);
  const detail::OneCutExpansion e(w, s);
  const auto& C = e.C;
  const double r1 =
      2.0 * w.w4 * C[2] + e.B * C[1] + e.A * C[0] + 0.5 * w.w1;
  const double r2 = 2.0 * w.w4 * C[3] + e.B * C[2] + e.A * C[1] - 1.0;
  return {r1, r2};
}

// int_{b1}^{a2} sqrt(q(x)) (4 w4 x + 4 w4 c1 + 3 w3) dx. The sqrt edge factors
// at b1 and a2 are absorbed into a Chebyshev rule on the gap so that doubling
// the order changes the value only at rounding level.
inline double two_cut_gap_integral(const QuarticPotential& w,
                                   const TwoCutSupport& s, int n = 64) {
  if (!(s.b1 < s.a2)) return 0.0;
  const double c1 = s.s1() / 2.0;
  const double m = 0.5 * (s.b1 + s.a2), r = 0.5 * (s.a2 - s.b1);
  const QuadRule& rule = gauss_chebyshev2_cached(n);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = m + r * rule.x[static_cast<std::size_t>(k)];
    const double rest = (x - s.a1) * (s.b2 - x);  // > 0 on the gap
    acc += rule.w[static_cast<std::size_t>(k)] * std::sqrt(rest) *
           (4.0 * w.w4 * x + 4.0 * w.w4 * c1 + 3.0 * w.w3);
  }
  return acc * r * r;
}

// Consistency conditions on a 2-cut support: three from the asymptotic
// expansion, one from equality of the Lagrange multiplier across the gap.
inline std::array<double, 4> two_cut_boundary_residuals(
    const QuarticPotential& w, const TwoCutSupport& s) {
  check_potential(w);
  check_support(s);
  const auto c = two_cut_coefficients(s);
  const double B = 0.5 * (4.0 * c[0] * w.w4 + 3.0 * w.w3);
  return {
      2.0 * c[1] * w.w4 + c[0] * B + w.w2,
      2.0 * c[2] * w.w4 + c[1] * B + 0.5 * w.w1,
      2.0 * c[3] * w.w4 + c[2] * B - 1.0,
      two_cut_gap_integral(w, s),
  };
}

namespace detail {

inline Moments expansion_moments(const QuarticPotential& w,
                                 const OneCutSupport& s) {
  const OneCutExpansion e(w, s);
  const auto& C = e.C;
  Moments m;
  m.m1 = 2.0 * w.w4 * C[4] + e.B * C[3] + e.A * C[2];
  m.m2 = 2.0 * w.w4 * C[5] + e.B * C[4] + e.A * C[3];
  m.m3 = 2.0 * w.w4 * C[6] + e.B * C[5] + e.A * C[4];
  return m;
}

inline Moments expansion_moments(const QuarticPotential& w,
                                 const TwoCutSupport& s) {
  const auto c = two_cut_coefficients(s);
  const double B = 0.5 * (4.0 * c[0] * w.w4 + 3.0 * w.w3);
  Moments m;
  m.m1 = 2.0 * w.w4 * c[4] + B * c[3];
  m.m2 = 2.0 * w.w4 * c[5] + B * c[4];
  m.m3 = 2.0 * w.w4 * c[6] + B * c[5];
  return m;
}

}  // namespace detail

// Moments read off from the asymptotic expansion. Only meaningful when the
// expansion-consistency residuals vanish, so these are gated at 1e-8.
inline Moments moment_extraction(const QuarticPotential& w,
                                 const OneCutSupport& s) {
  const auto [r1, r2] = one_cut_boundary_residuals(w, s);
  if (std::max(std::abs(r1), std::abs(r2)) > 1e-8)
    throw residual_violation("1-cut boundary residuals do not vanish");
  return detail::expansion_moments(w, s);
}

inline Moments moment_extraction(const QuarticPotential& w,
                                 const TwoCutSupport& s) {
  const auto r = two_cut_boundary_residuals(w, s);
  const double expansion_norm =
      std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
  if (expansion_norm > 1e-8)
    throw residual_violation("2-cut expansion residuals do not vanish");
  return detail::expansion_moments(w, s);
}

}  // namespace bgrmt
