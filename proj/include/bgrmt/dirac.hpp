#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "bgrmt/density.hpp"

namespace bgrmt {

// Spectral density of D_+ = {H,.} (sign +1) or D_- = [H,.] (sign -1) on a
// uniform grid: rho_D(s) = int rho(s -+ t) rho(t) dt.
struct DiracDensity {
  int sign = +1;
  std::vector<double> grid;
  std::vector<double> values;

  double spacing() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
};

inline DiracDensity dirac_density(const SpectralDensity& rho, int sign,
                                  int grid_points = 4096) {
  if (sign != +1 && sign != -1)
    throw std::invalid_argument("dirac_density: sign must be +1 or -1");
  if (grid_points < 512)
    throw std::invalid_argument("dirac_density: need at least 512 grid points");

  const double lo = rho.support_lo(), hi = rho.support_hi();
  const int n = grid_points;
  const double h = (hi - lo) / (n - 1);
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    f[static_cast<std::size_t>(i)] = rho.value(lo + i * h);

  DiracDensity out;
  out.sign = sign;
  const int m = 2 * n - 1;
  out.grid.resize(static_cast<std::size_t>(m));
  out.values.assign(static_cast<std::size_t>(m), 0.0);
  if (sign > 0) {
    // s = t + t': [2 lo, 2 hi]
    for (int k = 0; k < m; ++k)
      out.grid[static_cast<std::size_t>(k)] = 2.0 * lo + k * h;
    for (int i = 0; i < n; ++i) {
      const double fi = f[static_cast<std::size_t>(i)];
      if (fi == 0.0) continue;
      for (int j = 0; j < n; ++j)
        out.values[static_cast<std::size_t>(i + j)] +=
            fi * f[static_cast<std::size_t>(j)];
    }
  } else {
    // s = t - t': [-(hi-lo), hi-lo]
    for (int k = 0; k < m; ++k)
      out.grid[static_cast<std::size_t>(k)] = -(hi - lo) + k * h;
    for (int i = 0; i < n; ++i) {
      const double fi = f[static_cast<std::size_t>(i)];
      if (fi == 0.0) continue;
      for (int j = 0; j < n; ++j)
        out.values[static_cast<std::size_t>(i - j + n - 1)] +=
            fi * f[static_cast<std::size_t>(j)];
    }
  }
  for (double& v : out.values) v *= h;
  // renormalize away the discretization leakage
  double mass = 0.0;
  for (int k = 0; k + 1 < m; ++k)
    mass += 0.5 * h * (out.values[static_cast<std::size_t>(k)] +
                       out.values[static_cast<std::size_t>(k + 1)]);
  if (mass > 0.0)
    for (double& v : out.values) v /= mass;
  return out;
}

// All N^2 sums/differences s_mn = lam_m +- lam_n.
inline std::vector<double> dirac_sample(std::span<const double> lam, int sign) {
  if (sign != +1 && sign != -1)
    throw std::invalid_argument("dirac_sample: sign must be +1 or -1");
  std::vector<double> out;
  out.reserve(lam.size() * lam.size());
  for (double a : lam)
    for (double b : lam) out.push_back(sign > 0 ? a + b : a - b);
  return out;
}

}  // namespace bgrmt
