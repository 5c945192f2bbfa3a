#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgrmt/density.hpp"
#include "bgrmt/errors.hpp"
#include "bgrmt/model.hpp"

namespace bgrmt {

enum class McInit { EvenlySpaced, FromDensity, Explicit };

struct McConfig {
  GeometryModel model = GeometryModel::GaussianBaseline;
  double g = 0.0;
  int n = 2;                    // matrix size N >= 2
  long sweeps = 10000;          // total sweeps, burn-in included
  long burnin = 1000;
  double width = 0.5;           // initial proposal width
  std::uint64_t seed = 1;
  McInit init = McInit::EvenlySpaced;
  SpectralDensity init_density;        // used by FromDensity
  std::vector<double> init_values;     // used by Explicit
  long sample_every = 10;              // eigenvalue snapshot stride
};

inline void check_mc_config(const McConfig& c) {
  if (c.n < 2) throw std::invalid_argument("mc: need N >= 2");
  if (!(c.width > 0.0)) throw std::invalid_argument("mc: width must be positive");
  if (c.burnin < 0 || c.sweeps <= c.burnin)
    throw std::invalid_argument("mc: need sweeps > burnin >= 0");
  if (c.sample_every < 1) throw std::invalid_argument("mc: sample_every >= 1");
  if (c.init == McInit::Explicit &&
      static_cast<int>(c.init_values.size()) != c.n)
    throw std::invalid_argument("mc: explicit init has wrong length");
  if (c.init == McInit::FromDensity && c.init_density.cuts().empty())
    throw std::invalid_argument("mc: missing init density");
}

struct McState {
  std::vector<double> lam;
  PowerSums ps;
  double energy = 0.0;  // E = S - (2/N^2) sum log|lam_i - lam_j|
};

namespace detail {

inline double state_energy(const McConfig& c, std::span<const double> lam,
                           const PowerSums& ps) {
  const double n = static_cast<double>(lam.size());
  double lv = 0.0;
  for (std::size_t i = 0; i + 1 < lam.size(); ++i)
    for (std::size_t j = i + 1; j < lam.size(); ++j)
      lv += std::log(std::abs(lam[i] - lam[j]));
  return action_from_power_sums(c.model, c.g, ps, lam.size()) -
         2.0 / (n * n) * lv;
}

inline void refresh(const McConfig& c, McState& s) {
  s.ps = power_sums(s.lam);
  s.energy = state_energy(c, s.lam, s.ps);
}

// quantile start: lam_i = F^{-1}((i+1/2)/N) of the target density
inline std::vector<double> quantile_init(const SpectralDensity& d, int n) {
  constexpr int kGrid = 4096;
  std::vector<double> xs, cdf;
  double acc = 0.0;
  for (const DensityCut& c : d.cuts()) {
    const double h = (c.hi - c.lo) / kGrid;
    for (int i = 0; i <= kGrid; ++i) {
      const double x = c.lo + i * h;
      if (!xs.empty() && i == 0) {  // jump across a gap carries no mass
        xs.push_back(x);
        cdf.push_back(acc);
        continue;
      }
      if (!xs.empty()) acc += 0.5 * h * (d.value(x) + d.value(x - h));
      xs.push_back(x);
      cdf.push_back(acc);
    }
  }
  const double total = cdf.back();
  std::vector<double> out(static_cast<std::size_t>(n));
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    const double target = total * (i + 0.5) / n;
    while (j + 1 < cdf.size() && cdf[j + 1] < target) ++j;
    const double c0 = cdf[j], c1 = cdf[j + 1];
    const double t = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.5;
    out[static_cast<std::size_t>(i)] = xs[j] + t * (xs[j + 1] - xs[j]);
  }
  return out;
}

}  // namespace detail

inline McState initial_state(const McConfig& c) {
  check_mc_config(c);
  McState s;
  switch (c.init) {
    case McInit::EvenlySpaced: {
      s.lam.resize(static_cast<std::size_t>(c.n));
      for (int i = 0; i < c.n; ++i)
        s.lam[static_cast<std::size_t>(i)] = -2.0 + 4.0 * i / (c.n - 1.0);
      break;
    }
    case McInit::FromDensity:
      s.lam = detail::quantile_init(c.init_density, c.n);
      break;
    case McInit::Explicit:
      s.lam = c.init_values;
      break;
  }
  if (c.model == GeometryModel::Minus) {
    double mean = 0.0;
    for (double x : s.lam) mean += x;
    mean /= static_cast<double>(c.n);
    for (double& x : s.lam) x -= mean;
  }
  detail::refresh(c, s);
  return s;
}

struct SweepStats {
  long proposed = 0;
  long accepted = 0;
};

// One sweep = N proposal attempts. (1,0) and the baseline move a single
// eigenvalue; (0,1) moves a pair (lam_i+d, lam_j-d) so the trace is conserved.
// Delta E is assembled in O(N) from the power-sum update and the log-distance
// sums of the touched eigenvalues.
inline SweepStats metropolis_sweep(McState& s, const McConfig& c, double width,
                                   std::mt19937_64& rng) {
  const int n = c.n;
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  std::normal_distribution<double> gauss(0.0, width);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  SweepStats stats;

  for (int i = 0; i < n; ++i) {
    ++stats.proposed;
    const double d = gauss(rng);
    if (c.model == GeometryModel::Minus) {
      int j = pick(rng);
      while (j == i) j = pick(rng);
      const double xi = s.lam[static_cast<std::size_t>(i)];
      const double xj = s.lam[static_cast<std::size_t>(j)];
      const double yi = xi + d, yj = xj - d;
      bool clash = false;
      double dlog = 0.0;
      for (int k = 0; k < n && !clash; ++k) {
        if (k == i || k == j) continue;
        const double xk = s.lam[static_cast<std::size_t>(k)];
        if (yi == xk || yj == xk) { clash = true; break; }
        dlog += std::log(std::abs(yi - xk)) - std::log(std::abs(xi - xk));
        dlog += std::log(std::abs(yj - xk)) - std::log(std::abs(xj - xk));
      }
      if (clash || yi == yj) continue;
      dlog += std::log(std::abs(yi - yj)) - std::log(std::abs(xi - xj));
      PowerSums ps = power_sum_delta(s.ps, xi, yi);
      ps = power_sum_delta(ps, xj, yj);
      const double ds = action_from_power_sums(c.model, c.g, ps, static_cast<std::size_t>(n)) -
                        action_from_power_sums(c.model, c.g, s.ps, static_cast<std::size_t>(n));
      const double de = ds - 2.0 / nn * dlog;
      if (de <= 0.0 || unif(rng) < std::exp(-nn * de)) {
        s.lam[static_cast<std::size_t>(i)] = yi;
        s.lam[static_cast<std::size_t>(j)] = yj;
        s.ps = ps;
        s.energy += de;
        ++stats.accepted;
      }
    } else {
      const double xi = s.lam[static_cast<std::size_t>(i)];
      const double yi = xi + d;
      bool clash = false;
      double dlog = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        const double xk = s.lam[static_cast<std::size_t>(k)];
        if (yi == xk) { clash = true; break; }
        dlog += std::log(std::abs(yi - xk)) - std::log(std::abs(xi - xk));
      }
      if (clash) continue;
      const PowerSums ps = power_sum_delta(s.ps, xi, yi);
      const double ds = action_from_power_sums(c.model, c.g, ps, static_cast<std::size_t>(n)) -
                        action_from_power_sums(c.model, c.g, s.ps, static_cast<std::size_t>(n));
      const double de = ds - 2.0 / nn * dlog;
      if (de <= 0.0 || unif(rng) < std::exp(-nn * de)) {
        s.lam[static_cast<std::size_t>(i)] = yi;
        s.ps = ps;
        s.energy += de;
        ++stats.accepted;
      }
    }
  }
  return stats;
}

struct McTrace {
  std::vector<double> order_param;   // M = P1/N per sweep after burn-in
  std::vector<double> m2;            // P2/N per sweep after burn-in
  std::vector<double> energy;        // E per sweep after burn-in
  std::vector<double> pooled;        // eigenvalue snapshots, sample_every stride
  std::vector<double> final_eigenvalues;
  double acceptance_rate = 0.0;      // sampling phase
  double final_width = 0.0;
  double max_energy_drift = 0.0;     // worst bookkeeping drift seen in audits
};

// Burn-in with width adaptation toward acceptance in [0.3, 0.5] (x1.1 / x0.9
// per 10-sweep window), then fixed-width sampling. Deterministic per seed.
// (0,1) states are re-centered to exact zero trace every 10^3 sweeps; the
// running energy is audited against a from-scratch evaluation on the same
// cadence.
inline McTrace run_chain(const McConfig& c) {
  check_mc_config(c);
  McState s = initial_state(c);
  std::mt19937_64 rng(c.seed);
  McTrace trace;
  double width = c.width;

  long window_prop = 0, window_acc = 0;
  long sample_prop = 0, sample_acc = 0;
  const double n = static_cast<double>(c.n);

  for (long sweep = 0; sweep < c.sweeps; ++sweep) {
    const SweepStats st = metropolis_sweep(s, c, width, rng);
    const bool burning = sweep < c.burnin;
    if (burning) {
      window_prop += st.proposed;
      window_acc += st.accepted;
      if ((sweep + 1) % 10 == 0 && window_prop > 0) {
        const double rate = static_cast<double>(window_acc) / window_prop;
        if (rate > 0.5) width *= 1.1;
        else if (rate < 0.3) width *= 0.9;
        window_prop = window_acc = 0;
      }
    } else {
      sample_prop += st.proposed;
      sample_acc += st.accepted;
      trace.order_param.push_back(s.ps.p1 / n);
      trace.m2.push_back(s.ps.p2 / n);
      trace.energy.push_back(s.energy);
      if ((sweep - c.burnin) % c.sample_every == 0)
        trace.pooled.insert(trace.pooled.end(), s.lam.begin(), s.lam.end());
    }
    if ((sweep + 1) % 1000 == 0) {
      if (c.model == GeometryModel::Minus) {
        double mean = 0.0;
        for (double x : s.lam) mean += x;
        mean /= n;
        for (double& x : s.lam) x -= mean;
      }
      const double before = s.energy;
      detail::refresh(c, s);
      trace.max_energy_drift =
          std::max(trace.max_energy_drift, std::abs(before - s.energy));
    }
  }
  {
    const double before = s.energy;
    detail::refresh(c, s);
    trace.max_energy_drift =
        std::max(trace.max_energy_drift, std::abs(before - s.energy));
  }
  trace.final_eigenvalues = s.lam;
  trace.final_width = width;
  trace.acceptance_rate =
      sample_prop > 0 ? static_cast<double>(sample_acc) / sample_prop : 0.0;
  return trace;
}

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

struct Histogram {
  std::vector<double> centers;
  std::vector<double> density;  // normalized: sum density * bin_width = 1
  double bin_width = 0.0;
};

// Normalized histogram; bins == 0 selects the Freedman-Diaconis rule.
inline Histogram empirical_density(std::span<const double> samples,
                                   int bins = 0) {
  if (samples.empty())
    throw std::invalid_argument("empirical_density: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front(), hi = sorted.back();
  Histogram h;
  if (hi == lo) {
    h.centers = {lo};
    h.bin_width = 1.0;
    h.density = {1.0};
    return h;
  }
  if (bins <= 0) {
    const double q1 = sorted[static_cast<std::size_t>(0.25 * (sorted.size() - 1))];
    const double q3 = sorted[static_cast<std::size_t>(0.75 * (sorted.size() - 1))];
    const double iqr = std::max(q3 - q1, 1e-12);
    const double w =
        2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    bins = std::clamp(static_cast<int>(std::ceil((hi - lo) / w)), 1, 100000);
  }
  h.bin_width = (hi - lo) / bins;
  h.centers.resize(static_cast<std::size_t>(bins));
  h.density.assign(static_cast<std::size_t>(bins), 0.0);
  for (int i = 0; i < bins; ++i)
    h.centers[static_cast<std::size_t>(i)] = lo + (i + 0.5) * h.bin_width;
  for (double x : sorted) {
    int i = static_cast<int>((x - lo) / h.bin_width);
    i = std::clamp(i, 0, bins - 1);
    h.density[static_cast<std::size_t>(i)] += 1.0;
  }
  const double norm = static_cast<double>(sorted.size()) * h.bin_width;
  for (double& v : h.density) v /= norm;
  return h;
}

// ---------------------------------------------------------------------------
// Checkpoints: 8-byte little-endian count, then N little-endian float64,
// plus a text sidecar with model/g/sweeps/seed.
// ---------------------------------------------------------------------------

inline void write_checkpoint(const std::filesystem::path& path,
                             std::span<const double> values,
                             GeometryModel model, double g, long sweeps,
                             std::uint64_t seed) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint writer assumes a little-endian host");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  const std::uint64_t n = values.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  out.close();

  std::ofstream meta(path.string() + ".meta", std::ios::trunc);
  meta << "model=" << to_string(model) << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", g);
  meta << "g=" << buf << "\n";
  meta << "sweeps=" << sweeps << "\n";
  meta << "seed=" << seed << "\n";
}

struct Checkpoint {
  std::vector<double> values;
  std::string model;
  double g = 0.0;
  long sweeps = 0;
  std::uint64_t seed = 0;
};

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
  Checkpoint cp;
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n == 0 || n > (1ull << 32))
    throw std::runtime_error("corrupt checkpoint header");
  cp.values.resize(n);
  in.read(reinterpret_cast<char*>(cp.values.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("truncated checkpoint");

  std::ifstream meta(path.string() + ".meta");
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "model") cp.model = val;
    else if (key == "g") cp.g = std::stod(val);
    else if (key == "sweeps") cp.sweeps = std::stol(val);
    else if (key == "seed") cp.seed = std::stoull(val);
  }
  return cp;
}

}  // namespace bgrmt
