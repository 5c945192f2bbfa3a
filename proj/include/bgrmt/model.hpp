#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgrmt/errors.hpp"

namespace bgrmt {

// Which ensemble: Plus = (1,0), Minus = (0,1) with traceless constraint,
// GaussianBaseline = GUE validation mode (Monte-Carlo only).
enum class GeometryModel { Plus, Minus, GaussianBaseline };

inline const char* to_string(GeometryModel m) {
  switch (m) {
    case GeometryModel::Plus: return "10";
    case GeometryModel::Minus: return "01";
    case GeometryModel::GaussianBaseline: return "gue";
  }
  return "?";
}

// P_k = sum_i lambda_i^k, k = 1..4.
struct PowerSums {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0, p4 = 0.0;
};

inline PowerSums power_sums(std::span<const double> v) {
  PowerSums s;
  for (double x : v) {
    const double x2 = x * x;
    s.p1 += x;
    s.p2 += x2;
    s.p3 += x2 * x;
    s.p4 += x2 * x2;
  }
  return s;
}

// Replace the contribution of old_v by new_v in each P_k.
inline PowerSums power_sum_delta(PowerSums s, double old_v, double new_v) {
  const double o2 = old_v * old_v, n2 = new_v * new_v;
  s.p1 += new_v - old_v;
  s.p2 += n2 - o2;
  s.p3 += n2 * new_v - o2 * old_v;
  s.p4 += n2 * n2 - o2 * o2;
  return s;
}

struct EigenvalueConfig {
  std::vector<double> values;
  GeometryModel model = GeometryModel::Plus;
  double g = 0.0;
};

inline constexpr double kTraceTolPerEigenvalue = 1e-12;

inline void check_config(const EigenvalueConfig& c) {
  if (c.values.empty())
    throw std::invalid_argument("eigenvalue configuration must be non-empty");
  for (double x : c.values)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite eigenvalue");
  if (c.model == GeometryModel::Minus) {
    double tr = 0.0;
    for (double x : c.values) tr += x;
    if (std::abs(tr) > kTraceTolPerEigenvalue * static_cast<double>(c.values.size()))
      throw std::invalid_argument("trace constraint violated in the (0,1) model");
  }
}

// Action of an eigenvalue configuration expressed through power sums:
//   S = (2/N)(P4 + g P2) +- (2g/N^2) P1^2 +- (8/N^2) P1 P3 + (6/N^2) P2^2
// with + for (1,0) and - for (0,1) (where P1 = 0 anyway). The Gaussian
// baseline uses the potential lambda^2/2, i.e. S = P2/(2N).
inline double action_from_power_sums(GeometryModel model, double g,
                                     const PowerSums& s, std::size_t count) {
  const double n = static_cast<double>(count);
  if (model == GeometryModel::GaussianBaseline) return s.p2 / (2.0 * n);
  const double sign = (model == GeometryModel::Plus) ? 1.0 : -1.0;
  return 2.0 / n * (s.p4 + g * s.p2) +
         sign * (2.0 * g / (n * n)) * s.p1 * s.p1 +
         sign * (8.0 / (n * n)) * s.p1 * s.p3 + 6.0 / (n * n) * s.p2 * s.p2;
}

inline double action_of_eigenvalues(const EigenvalueConfig& c) {
  check_config(c);
  return action_from_power_sums(c.model, c.g, power_sums(c.values),
                                c.values.size());
}

// sum_{i<j} log|lambda_i - lambda_j|
inline double log_vandermonde(std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const double d = v[i] - v[j];
      if (d == 0.0)
        throw degenerate_configuration("coincident eigenvalues");
      s += std::log(std::abs(d));
    }
  return s;
}

// E(Lambda) = S(Lambda) - (2/N^2) sum_{i<j} log|lambda_i - lambda_j|;
// the joint eigenvalue density is proportional to exp(-N^2 E).
inline double coulomb_energy(const EigenvalueConfig& c) {
  check_config(c);
  const double n = static_cast<double>(c.values.size());
  return action_of_eigenvalues(c) - 2.0 / (n * n) * log_vandermonde(c.values);
}

struct Moments {
  double m1 = 0.0, m2 = 0.0, m3 = 0.0;
  std::optional<double> m4;
};

inline void check_moments(const Moments& m, double tol = 1e-9) {
  if (m.m2 < -tol) throw std::invalid_argument("m2 must be non-negative");
  if (m.m2 - m.m1 * m.m1 < -tol)
    throw std::invalid_argument("m2 >= m1^2 must hold for a probability measure");
}

}  // namespace bgrmt
