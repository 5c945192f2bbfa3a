// Acceptance suite: one pass/fail line per criterion, non-zero exit when any
// criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "bgrmt/bgrmt.hpp"
#include "support/oracles.hpp"

using namespace bgrmt;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] %2d. %s — %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// probe points spanning every cut, away from the edges
std::vector<double> spread_probes(const SpectralDensity& d) {
  std::vector<double> out;
  const double fracs[] = {0.15, 0.3, 0.5, 0.7, 0.85};
  for (const DensityCut& c : d.cuts())
    for (double f : fracs) out.push_back(c.lo + f * (c.hi - c.lo));
  return out;
}

struct OracleChecks {
  double moment_gap = 0.0;   // extraction vs quadrature
  double ell_spread = 0.0;   // max - min over probes
  double route_gap = 0.0;    // identity vs direct functional
};

OracleChecks oracle_checks(const EquilibriumSolution& sol) {
  OracleChecks oc;
  const QuarticPotential w = effective_potential(sol.model, sol.g, sol.moments);
  Moments ext;
  if (sol.params.two_cut())
    ext = moment_extraction(w, sol.params.two_cut_support());
  else
    ext = moment_extraction(w, sol.params.one_cut_support());
  oc.moment_gap = std::max(
      {std::abs(ext.m1 - density_moment(sol.density, 1)),
       std::abs(ext.m2 - density_moment(sol.density, 2)),
       std::abs(ext.m3 - density_moment(sol.density, 3))});

  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (double x0 : spread_probes(sol.density)) {
    const double ell =
        lagrange_multiplier(sol.model, sol.g, sol.density, sol.moments, x0);
    if (first) { lo = hi = ell; first = false; }
    lo = std::min(lo, ell);
    hi = std::max(hi, ell);
  }
  oc.ell_spread = hi - lo;

  const double direct =
      oracles::direct_free_energy(sol.model, sol.g, sol.density);
  oc.route_gap = std::abs(direct - sol.energy);
  return oc;
}

double m2_closed_form(double g) {
  return g > kCritical01 ? solve_one_cut_01(g).params.m2
                         : solve_two_cut_01(g).params.m2;
}

double l1_vs_density(const Histogram& h, const SpectralDensity& d) {
  return oracles::l1_distance(
      h.centers, h.density, h.bin_width, [&](double x) { return d.value(x); },
      d.support_lo(), d.support_hi());
}

}  // namespace

int main() {
  // ------------------------------------------------------------------ 1
  {
    const double gcr = locate_critical(GeometryModel::Minus);
    const double expect = -4.0 * std::sqrt(2.0);
    report(1, "(0,1) critical coupling = -4 sqrt(2)",
           std::abs(gcr - expect) <= 1e-9, "g_cr = " + num(gcr));
  }

  // ------------------------------------------------------------------ 2
  double gcr_plus = -3.19;
  {
    bool pass = false;
    std::string detail;
    try {
      gcr_plus = locate_critical(GeometryModel::Plus, -3.4, -3.0);
      pass = (gcr_plus >= -3.20 && gcr_plus <= -3.17);
      detail = "g_cr = " + num(gcr_plus);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    report(2, "(1,0) critical coupling in [-3.20, -3.17]", pass, detail);
  }

  // ------------------------------------------------------------------ 3
  {
    // reference digits from the defining relations
    //   a = sqrt(7 - 4 sqrt 2)/(2 sqrt 2), b = sqrt(7 + 4 sqrt 2)/(2 sqrt 2)
    const auto s = solve_two_cut_01(-7.0).params;
    const double err = std::max({std::abs(s.a - 0.4097477502237839),
                                 std::abs(s.b - 1.2578182623839371),
                                 std::abs(s.m2 - 0.875)});
    report(3, "(0,1) 2-cut support and m2 at g=-7", err <= 1e-6,
           "a=" + num(s.a) + " b=" + num(s.b) + " m2=" + num(s.m2) +
               ", max deviation " + num(err));
  }

  // ------------------------------------------------------------------ 4
  {
    const auto one = solve_one_cut_01(kCritical01);
    const auto two = solve_two_cut_01(kCritical01);
    const double b = std::pow(2.0, 0.25);  // b^2 = sqrt(2)
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = -b + 2.0 * b * i / 999.0;
      const double ref =
          4.0 * x * x / M_PI * std::sqrt(std::max((b - x) * (b + x), 0.0));
      worst = std::max({worst, std::abs(one.density.value(x) - ref),
                        std::abs(two.density.value(x) - ref)});
    }
    report(4, "critical-density identity on a 1000-point grid", worst <= 1e-9,
           "max pointwise deviation " + num(worst));
  }

  // ------------------------------------------------------------------ 5
  {
    const double h = 1e-3;
    const double gc = kCritical01;
    const double d_left = (m2_closed_form(gc) - m2_closed_form(gc - h)) / h;
    const double d_right = (m2_closed_form(gc + h) - m2_closed_form(gc)) / h;
    const double slope_jump = std::abs(d_left - d_right);

    Asym2CutBranch branch;
    bool pass = slope_jump < 1e-4;
    std::string detail = "(0,1) dm2/dg jump " + num(slope_jump);
    const auto below = branch.at(gcr_plus - 0.01);
    if (below) {
      const auto sym = solve_one_cut_01(gcr_plus + 0.01).params;
      const double dm1 = std::abs(below->x[4] - 0.0);
      const double dm2 = std::abs(below->x[5] - sym.m2);
      const double dm3 = std::abs(below->x[6] - 0.0);
      pass = pass && dm1 > 0.1 && dm2 > 0.01 && dm3 > 0.01;
      detail += "; (1,0) jumps m1=" + num(dm1) + " m2=" + num(dm2) +
                " m3=" + num(dm3);
    } else {
      pass = false;
      detail += "; broken branch unavailable next to g_cr";
    }
    report(5, "transition orders at both critical couplings", pass, detail);
  }

  // ------------------------------------------------------------------ 6
  {
    struct Branch {
      GeometryModel model;
      Ansatz ansatz;
      std::vector<double> gs;
    };
    const std::vector<Branch> shipped = {
        {GeometryModel::Minus, Ansatz::Sym1Cut, {2.0, 0.0, -3.0, -5.0}},
        {GeometryModel::Minus, Ansatz::Sym2Cut, {-6.0, -7.0, -9.0}},
        {GeometryModel::Plus, Ansatz::Sym1Cut, {0.0, -3.0}},
        {GeometryModel::Plus, Ansatz::Sym2Cut, {-7.0}},
        {GeometryModel::Plus, Ansatz::Asym2Cut, {-6.0, -5.0, -4.0}},
    };
    Asym2CutBranch follower;
    double worst_m = 0.0, worst_ell = 0.0, worst_route = 0.0;
    bool pass = true;
    for (const Branch& br : shipped) {
      for (double g : br.gs) {
        CandidateParams p;
        if (br.ansatz == Ansatz::Sym1Cut) {
          const auto s = solve_one_cut_01(g).params;
          p = CandidateParams::sym1(s.b, s.m2);
        } else if (br.ansatz == Ansatz::Sym2Cut) {
          const auto s = solve_two_cut_01(g).params;
          p = CandidateParams::sym2(s.a, s.b);
        } else {
          const auto bp = follower.at(g);
          if (!bp) { pass = false; continue; }
          p = *bp;
        }
        const EquilibriumSolution sol = make_solution(br.model, g, p);
        const OracleChecks oc = oracle_checks(sol);
        worst_m = std::max(worst_m, oc.moment_gap);
        worst_ell = std::max(worst_ell, oc.ell_spread);
        worst_route = std::max(worst_route, oc.route_gap);
      }
    }
    pass = pass && worst_m <= 1e-9 && worst_ell <= 1e-6 && worst_route <= 1e-6;
    report(6, "oracle equivalence on every shipped branch", pass,
           "moments " + num(worst_m) + ", ell spread " + num(worst_ell) +
               ", energy routes " + num(worst_route));
  }

  // ------------------------------------------------------------------ 7
  {
    const std::vector<double> above = {3.0, 2.0,  1.0,  0.5,  0.0,
                                       -1.0, -2.0, -3.0, -4.0, -5.0};
    const std::vector<double> below = {-5.7, -6.0, -6.5, -7.0,  -8.0,
                                       -9.0, -10.0, -12.0, -15.0, -20.0};
    double worst = 0.0;
    for (double g : above) {
      const auto s = solve_one_cut_01(g).params;
      const auto r = residuals_10_one_cut(
          g, CandidateParams::asym1(-s.b, s.b, 0.0, s.m2, 0.0));
      for (double v : r) worst = std::max(worst, std::abs(v));
    }
    for (double g : below) {
      const auto s = solve_two_cut_01(g).params;
      const auto r = residuals_10_two_cut(
          g, CandidateParams::asym2(-s.b, -s.a, s.a, s.b, 0.0, s.m2, 0.0));
      for (double v : r) worst = std::max(worst, std::abs(v));
    }
    report(7, "closed forms satisfy the general residual systems (20 g)",
           worst <= 1e-10, "residual inf-norm " + num(worst));
  }

  // ------------------------------------------------------------------ 8
  {
    bool pass = true;
    std::string detail;

    auto run_scenario = [&](GeometryModel model, double g,
                            const SpectralDensity& theory, McInit init,
                            const char* label) {
      McConfig cfg;
      cfg.model = model;
      cfg.g = g;
      cfg.n = 128;
      cfg.sweeps = 100000;
      cfg.burnin = 10000;
      cfg.seed = 20240811;
      cfg.init = init;
      if (init == McInit::FromDensity) cfg.init_density = theory;
      const McTrace tr = run_chain(cfg);
      const Histogram h = empirical_density(tr.pooled);
      const double l1 = l1_vs_density(h, theory);
      pass = pass && l1 < 0.05;
      detail += std::string(label) + " L1=" + num(l1) + " ";
      return tr;
    };

    const auto sym1 = solve_one_cut_01(-3.0).density;
    run_scenario(GeometryModel::Plus, -3.0, sym1, McInit::EvenlySpaced,
                 "10@-3");

    const auto sym2 = solve_two_cut_01(-7.0).density;
    run_scenario(GeometryModel::Minus, -7.0, sym2, McInit::EvenlySpaced,
                 "01@-7");

    Asym2CutBranch follower;
    const auto bs = follower.at(-4.0);
    if (bs) {
      const EquilibriumSolution sol =
          make_solution(GeometryModel::Plus, -4.0, *bs);
      const McTrace tr = run_scenario(GeometryModel::Plus, -4.0, sol.density,
                                      McInit::FromDensity, "10@-4(bs)");
      double min_abs_m = 1e300;
      for (double m : tr.order_param) min_abs_m = std::min(min_abs_m, std::abs(m));
      pass = pass && min_abs_m > 0.2;
      detail += "min|M|=" + num(min_abs_m) + " ";
    } else {
      pass = false;
      detail += "broken branch unavailable ";
    }

    // GUE m2 within three standard errors of 1
    {
      McConfig cfg;
      cfg.model = GeometryModel::GaussianBaseline;
      cfg.n = 64;
      cfg.sweeps = 20000;
      cfg.burnin = 2000;
      cfg.seed = 7;
      const McTrace tr = run_chain(cfg);
      const std::size_t nb = 20, bl = tr.m2.size() / nb;
      std::vector<double> batch(nb, 0.0);
      for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t i = 0; i < bl; ++i) batch[b] += tr.m2[b * bl + i];
        batch[b] /= static_cast<double>(bl);
      }
      const double mean =
          std::accumulate(batch.begin(), batch.end(), 0.0) / static_cast<double>(nb);
      double var = 0.0;
      for (double v : batch) var += (v - mean) * (v - mean);
      var /= static_cast<double>(nb - 1);
      const double se = std::sqrt(var / static_cast<double>(nb));
      const bool ok = std::abs(mean - 1.0) < 3.0 * std::max(se, 1e-4);
      pass = pass && ok;
      detail += "gue m2=" + num(mean) + "+-" + num(se);
    }
    report(8, "Monte-Carlo distributional agreement", pass, detail);
  }

  // ------------------------------------------------------------------ 9
  {
    Asym2CutBranch follower;
    bool pass = true;
    double worst_res = 0.0, worst_closure = 0.0, worst_mirror = 0.0;
    bool energy_ordered = true;
    int points = 0;
    for (double g = -7.0; g <= gcr_plus - 1e-9; g += 0.1) {
      const auto p = follower.at(g);
      if (!p) { pass = false; continue; }
      ++points;
      const auto r = residuals_10_two_cut(g, *p);
      for (double v : r) worst_res = std::max(worst_res, std::abs(v));

      EquilibriumSolution sol;
      try {
        sol = make_solution(GeometryModel::Plus, g, *p);
      } catch (const non_admissible_density&) {
        pass = false;
        continue;
      }
      const double closure = std::max(
          {std::abs(sol.moments.m1 - density_moment(sol.density, 1)),
           std::abs(sol.moments.m2 - density_moment(sol.density, 2)),
           std::abs(sol.moments.m3 - density_moment(sol.density, 3))});
      worst_closure = std::max(worst_closure, closure);

      const EquilibriumSolution mir = mirror(sol);
      const double e_mirror =
          free_energy_of(GeometryModel::Plus, g, mir.density, mir.moments);
      worst_mirror = std::max(worst_mirror, std::abs(e_mirror - sol.energy));

      if (g <= kCritical01) {
        const auto s = solve_two_cut_01(g).params;
        const EquilibriumSolution sym = make_solution(
            GeometryModel::Plus, g, CandidateParams::sym2(s.a, s.b));
        if (!(sol.energy < sym.energy)) energy_ordered = false;
      }
      if (g > kCritical01) {
        const auto s = solve_one_cut_01(g).params;
        const EquilibriumSolution sym = make_solution(
            GeometryModel::Plus, g, CandidateParams::sym1(s.b, s.m2));
        if (!(sol.energy < sym.energy)) energy_ordered = false;
      }
    }
    pass = pass && points > 30 && worst_res < 1e-12 && worst_closure < 1e-9 &&
           worst_mirror < 1e-10 && energy_ordered;
    report(9, "broken-branch certification on a 0.1-step grid", pass,
           "points " + std::to_string(points) + ", residuals " +
               num(worst_res) + ", closure " + num(worst_closure) +
               ", mirror dE " + num(worst_mirror) +
               (energy_ordered ? ", energies ordered" : ", ENERGY ORDER FAILS"));
  }

  // ------------------------------------------------------------------ 10
  {
    const double g = -1.0;
    McConfig cfg;
    cfg.model = GeometryModel::Minus;
    cfg.g = g;
    cfg.n = 2;
    cfg.sweeps = 1'100'000;
    cfg.burnin = 100'000;
    cfg.seed = 99;
    cfg.sample_every = 1;
    const McTrace tr = run_chain(cfg);

    auto unnorm = [g](double x) {
      return 4.0 * x * x * std::exp(-32.0 * x * x * x * x - 8.0 * g * x * x);
    };
    const double L = 1.6;
    const int grid = 20000;
    std::vector<double> cdf(static_cast<std::size_t>(grid + 1), 0.0);
    double acc = 0.0;
    const double h = 2.0 * L / grid;
    for (int i = 1; i <= grid; ++i) {
      const double x0 = -L + (i - 1) * h, x1 = -L + i * h;
      acc += 0.5 * h * (unnorm(x0) + unnorm(x1));
      cdf[static_cast<std::size_t>(i)] = acc;
    }
    for (double& v : cdf) v /= acc;

    std::vector<double> xs;
    xs.reserve(tr.pooled.size() / 2);
    for (std::size_t i = 0; i < tr.pooled.size(); i += 2)
      xs.push_back(tr.pooled[i]);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const int idx =
          std::clamp(static_cast<int>((xs[i] + L) / h), 0, grid);
      const double ref = cdf[static_cast<std::size_t>(idx)];
      const double hi_e = static_cast<double>(i + 1) / static_cast<double>(xs.size());
      const double lo_e = static_cast<double>(i) / static_cast<double>(xs.size());
      ks = std::max({ks, std::abs(hi_e - ref), std::abs(lo_e - ref)});
    }
    report(10, "exact N=2 chain vs 1-D quadrature (KS)", ks < 0.01,
           "KS statistic " + num(ks) + " over " + std::to_string(xs.size()) +
               " samples");
  }

  std::printf("%s: %d criterion(s) failed\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
