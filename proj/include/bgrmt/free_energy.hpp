#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgrmt/closed_form_01.hpp"
#include "bgrmt/density.hpp"
#include "bgrmt/errors.hpp"
#include "bgrmt/model.hpp"
#include "bgrmt/self_consistent.hpp"

namespace bgrmt {

// Single-particle potential of the eigenvalue gas. The baseline mode uses
// lambda^2/2 so the reference measure is the semicircle on [-2,2].
inline double model_potential(GeometryModel model, double g, double x) {
  if (model == GeometryModel::GaussianBaseline) return 0.5 * x * x;
  return 2.0 * x * x * x * x + 2.0 * g * x * x;
}

// 2 int U(x0, y) rho(y) dy, which collapses onto the moments:
//   (1,0): 2 (2 g x0 m1 + 4 x0 m3 + 4 x0^3 m1 + 6 x0^2 m2)
//   (0,1): 12 x0^2 m2
inline double pair_potential_term(GeometryModel model, double g,
                                  const Moments& m, double x0) {
  switch (model) {
    case GeometryModel::Plus:
      return 2.0 * (2.0 * g * x0 * m.m1 + 4.0 * x0 * m.m3 +
                    4.0 * x0 * x0 * x0 * m.m1 + 6.0 * x0 * x0 * m.m2);
    case GeometryModel::Minus:
      return 12.0 * x0 * x0 * m.m2;
    case GeometryModel::GaussianBaseline:
      return 0.0;
  }
  return 0.0;
}

// Lagrange multiplier of the constrained variational problem, evaluated at a
// probe point x0 strictly inside the support:
//   ell = V(x0) + 2 int U(x0,y) rho(y) dy + 2 int log(1/|x0-y|) rho(y) dy
// On an equilibrium density this is independent of x0.
inline double lagrange_multiplier(GeometryModel model, double g,
                                  const SpectralDensity& density,
                                  const Moments& m, double x0) {
  const int cut = density.find_cut(x0);
  if (cut < 0)
    throw std::invalid_argument("lagrange_multiplier: probe outside support");
  const DensityCut& c = density.cuts()[static_cast<std::size_t>(cut)];
  const double margin = 1e-3 * (c.hi - c.lo);
  if (x0 < c.lo + margin || x0 > c.hi - margin)
    throw std::invalid_argument("lagrange_multiplier: probe too close to an edge");
  return model_potential(model, g, x0) + pair_potential_term(model, g, m, x0) -
         2.0 * log_kernel_integral(density, x0);
}

// Default probe points: the density maximum of each cut.
inline std::vector<double> lagrange_probes(const SpectralDensity& d) {
  std::vector<double> probes;
  for (std::size_t k = 0; k < d.cuts().size(); ++k)
    probes.push_back(density_argmax(d, static_cast<int>(k)));
  return probes;
}

// E = (ell + int V rho)/2 with int V rho = 2 m4 + 2 g m2 (or m2/2 for the
// baseline). Follows from integrating the variational equality against rho:
// the pair term integrates to twice its energy contribution.
inline double free_energy_from_lagrange(GeometryModel model, double g,
                                        const Moments& m, double ell) {
  const double v1 = (model == GeometryModel::GaussianBaseline)
                        ? 0.5 * m.m2
                        : 2.0 * m.m4.value() + 2.0 * g * m.m2;
  return 0.5 * (ell + v1);
}

inline double free_energy_of(GeometryModel model, double g,
                             const SpectralDensity& density, Moments m) {
  if (!m.m4) m.m4 = density_moment(density, 4);
  const double probe = density_argmax(density, 0);
  const double ell = lagrange_multiplier(model, g, density, m, probe);
  return free_energy_from_lagrange(model, g, m, ell);
}

// A fully assembled candidate: parameters, density, multiplier, energy.
struct EquilibriumSolution {
  GeometryModel model = GeometryModel::Plus;
  double g = 0.0;
  Ansatz ansatz = Ansatz::Sym1Cut;
  CandidateParams params;
  Moments moments;
  SpectralDensity density;
  double lagrange = 0.0;
  double lagrange_spread = 0.0;  // max - min over per-cut probes
  double energy = 0.0;
};

inline EquilibriumSolution make_solution(GeometryModel model, double g,
                                         const CandidateParams& p) {
  EquilibriumSolution sol;
  sol.model = model;
  sol.g = g;
  sol.ansatz = p.ansatz;
  sol.params = p;
  sol.moments = p.moments();
  const QuarticPotential w = effective_potential(model, g, sol.moments);
  if (p.two_cut()) {
    const TwoCutSupport s = p.two_cut_support();
    if (s.a2 - s.b1 < 1e-12 && p.ansatz == Ansatz::Sym2Cut) {
      sol.density = solve_two_cut_01(g).density;  // degenerate gap
    } else {
      sol.density = build_two_cut_density(w, s);
    }
  } else {
    sol.density = build_one_cut_density(w, p.one_cut_support());
  }
  sol.moments.m4 = density_moment(sol.density, 4);
  check_moments(sol.moments);

  double lo = 0.0, hi = 0.0;
  bool first = true;
  double sum = 0.0;
  const std::vector<double> probes = lagrange_probes(sol.density);
  for (double x0 : probes) {
    const double ell = lagrange_multiplier(model, g, sol.density, sol.moments, x0);
    sum += ell;
    if (first) { lo = hi = ell; first = false; }
    lo = std::min(lo, ell);
    hi = std::max(hi, ell);
  }
  sol.lagrange = sum / static_cast<double>(probes.size());
  sol.lagrange_spread = hi - lo;
  sol.energy = free_energy_from_lagrange(model, g, sol.moments, sol.lagrange);
  return sol;
}

inline EquilibriumSolution mirror(const EquilibriumSolution& s) {
  EquilibriumSolution out = s;
  out.params = mirror(s.params);
  out.moments.m1 = -s.moments.m1;
  out.moments.m3 = -s.moments.m3;
  out.density = mirror(s.density);
  return out;
}

// Mean density of states when the symmetry is broken: (rho(x)+rho(-x))/2.
struct SymmetrizedDensity {
  SpectralDensity base;
  double operator()(double x) const {
    return 0.5 * (base.value(x) + base.value(-x));
  }
};

struct Selection {
  EquilibriumSolution solution;
  bool degenerate = false;       // top two energies within 1e-9
  bool symmetry_broken = false;  // winner has m1 != 0
  std::optional<SymmetrizedDensity> mean_dos;
};

// Pick the minimal-energy candidate. The reported representative of a broken
// pair is the one with m1 >= 0; the symmetrized mean density accompanies it.
inline Selection select_equilibrium(const std::vector<EquilibriumSolution>& candidates) {
  if (candidates.empty())
    throw std::invalid_argument("select_equilibrium: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (candidates[i].energy < candidates[best].energy) best = i;
  Selection sel;
  sel.solution = candidates[best];
  if (sel.solution.moments.m1 < 0.0) sel.solution = mirror(sel.solution);
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (i != best &&
        std::abs(candidates[i].energy - candidates[best].energy) < 1e-9)
      sel.degenerate = true;
  if (std::abs(sel.solution.moments.m1) > 1e-8) {
    sel.symmetry_broken = true;
    sel.mean_dos = SymmetrizedDensity{sel.solution.density};
  }
  return sel;
}

// ---------------------------------------------------------------------------
// Branch scans and critical couplings
// ---------------------------------------------------------------------------

struct BranchScan {
  std::vector<EquilibriumSolution> points;
  double branch_end_g = 0.0;   // last coupling that solved
  std::string end_reason;      // empty when the whole range solved
};

namespace detail {

inline std::optional<CandidateParams> closed_form_candidate(Ansatz ansatz,
                                                            double g) {
  try {
    if (ansatz == Ansatz::Sym1Cut) {
      const auto sol = solve_one_cut_01(g);
      return CandidateParams::sym1(sol.params.b, sol.params.m2);
    }
    const auto sol = solve_two_cut_01(g);
    return CandidateParams::sym2(sol.params.a, sol.params.b);
  } catch (const out_of_branch&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Path-following over a range of couplings. Symmetric branches come from the
// closed forms; the broken-symmetry branch is continued by Newton. The scan
// stops early (recording the endpoint) when a branch ceases to exist.
inline BranchScan branch_scan(GeometryModel model, Ansatz ansatz, double g_from,
                              double g_to, double step) {
  if (step == 0.0) throw std::invalid_argument("branch_scan: step must be non-zero");
  if ((g_to - g_from) * step < 0.0)
    throw std::invalid_argument("branch_scan: step points away from g_to");
  if (ansatz == Ansatz::Asym1Cut)
    throw std::invalid_argument("branch_scan: no seeded asymmetric 1-cut branch");
  if (ansatz == Ansatz::Asym2Cut && model != GeometryModel::Plus)
    throw std::invalid_argument("branch_scan: asymmetric branch requires (1,0)");

  BranchScan scan;
  Asym2CutBranch follower;
  bool have_any = false;
  const double eps = 1e-9 * std::abs(step);
  for (double g = g_from;
       (step > 0.0) ? g <= g_to + eps : g >= g_to - eps; g += step) {
    std::optional<CandidateParams> cand;
    if (ansatz == Ansatz::Asym2Cut) {
      cand = follower.at(g);
    } else {
      cand = detail::closed_form_candidate(ansatz, g);
    }
    if (!cand) {
      if (!have_any) throw seed_failure("branch_scan: no solution at g_from");
      scan.end_reason = "branch lost";
      return scan;
    }
    try {
      scan.points.push_back(make_solution(model, g, *cand));
    } catch (const non_admissible_density&) {
      if (!have_any) throw seed_failure("branch_scan: density not admissible at g_from");
      scan.end_reason = "density lost admissibility";
      return scan;
    }
    scan.branch_end_g = g;
    have_any = true;
  }
  return scan;
}

inline double locate_critical(GeometryModel model, double g_lo, double g_hi);

// One row of a coupling scan: every branch that converged at this g.
struct PhasePoint {
  double g = 0.0;
  std::vector<EquilibriumSolution> candidates;
  std::size_t chosen = 0;  // index of the minimal-energy candidate
  bool degenerate = false;
};

struct PhaseReport {
  std::vector<PhasePoint> points;
  std::optional<double> critical_g;
};

// All branches over a grid of couplings, with the equilibrium flagged per g
// and the critical coupling estimated when the grid crosses it.
inline PhaseReport phase_report(GeometryModel model, double g_from, double g_to,
                                double step) {
  if (step == 0.0) throw std::invalid_argument("phase_report: step must be non-zero");
  if (model == GeometryModel::GaussianBaseline)
    throw std::invalid_argument("phase_report: model must be 10 or 01");
  PhaseReport rep;
  Asym2CutBranch follower;
  const double dir = (g_to > g_from) ? std::abs(step) : -std::abs(step);
  const double eps = 1e-9 * std::abs(step);
  for (double g = g_from;
       (dir > 0.0) ? g <= g_to + eps : g >= g_to - eps; g += dir) {
    PhasePoint pt;
    pt.g = g;
    if (g >= kCritical01) {
      const auto s = solve_one_cut_01(g).params;
      pt.candidates.push_back(
          make_solution(model, g, CandidateParams::sym1(s.b, s.m2)));
    }
    if (g <= kCritical01) {
      const auto s = solve_two_cut_01(g).params;
      pt.candidates.push_back(
          make_solution(model, g, CandidateParams::sym2(s.a, s.b)));
    }
    if (model == GeometryModel::Plus && g < 0.0) {
      try {
        if (const auto p = follower.at(g))
          pt.candidates.push_back(make_solution(model, g, *p));
      } catch (const seed_failure&) {
      }
    }
    if (pt.candidates.empty()) continue;
    for (std::size_t i = 1; i < pt.candidates.size(); ++i)
      if (pt.candidates[i].energy < pt.candidates[pt.chosen].energy)
        pt.chosen = i;
    for (std::size_t i = 0; i < pt.candidates.size(); ++i)
      if (i != pt.chosen &&
          std::abs(pt.candidates[i].energy - pt.candidates[pt.chosen].energy) <
              1e-9)
        pt.degenerate = true;
    rep.points.push_back(std::move(pt));
  }

  const double lo = std::min(g_from, g_to), hi = std::max(g_from, g_to);
  if (model == GeometryModel::Minus) {
    if (lo <= kCritical01 && kCritical01 <= hi) rep.critical_g = kCritical01;
  } else {
    // the chosen ansatz switching between rows brackets the crossing
    for (std::size_t i = 1; i < rep.points.size(); ++i) {
      const auto& a = rep.points[i - 1];
      const auto& b = rep.points[i];
      const Ansatz aa = a.candidates[a.chosen].ansatz;
      const Ansatz ab = b.candidates[b.chosen].ansatz;
      const bool sym_to_bs = (aa == Ansatz::Sym1Cut && ab == Ansatz::Asym2Cut) ||
                             (aa == Ansatz::Asym2Cut && ab == Ansatz::Sym1Cut);
      if (sym_to_bs) {
        try {
          rep.critical_g = locate_critical(model, std::min(a.g, b.g),
                                           std::max(a.g, b.g));
        } catch (const no_sign_change&) {
        }
        break;
      }
    }
  }
  return rep;
}

// Critical coupling. (0,1): the analytic branch boundary -4 sqrt(2).
// (1,0): bisection on the energy difference between the symmetric 1-cut and
// the broken-symmetry 2-cut; couplings beyond the fold of the broken branch
// count as "1-cut wins".
inline double locate_critical(GeometryModel model, double g_lo = 0.0,
                              double g_hi = 0.0) {
  if (model == GeometryModel::Minus) return kCritical01;
  if (model != GeometryModel::Plus)
    throw std::invalid_argument("locate_critical: model must be 10 or 01");
  if (!(g_lo < g_hi))
    throw std::invalid_argument("locate_critical: need a bracket g_lo < g_hi");

  Asym2CutBranch follower;
  auto delta = [&](double g) -> double {
    const auto sym = detail::closed_form_candidate(Ansatz::Sym1Cut, g);
    if (!sym)
      throw no_sign_change("locate_critical: symmetric 1-cut absent in bracket");
    const double e1 = make_solution(GeometryModel::Plus, g, *sym).energy;
    const auto bs = follower.at(g);
    if (!bs) return -1.0;  // branch ended below g: the 1-cut is the minimum
    const double e2 = make_solution(GeometryModel::Plus, g, *bs).energy;
    return e1 - e2;
  };

  double lo = g_lo, hi = g_hi;
  double flo = delta(lo), fhi = delta(hi);
  if ((flo > 0.0) == (fhi > 0.0))
    throw no_sign_change("locate_critical: energies do not cross in bracket");
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    const double fm = delta(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bgrmt
