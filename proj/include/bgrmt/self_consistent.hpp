#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgrmt/closed_form_01.hpp"
#include "bgrmt/errors.hpp"
#include "bgrmt/model.hpp"
#include "bgrmt/riemann_hilbert.hpp"

namespace bgrmt {

// Effective one-body quartic obtained by absorbing the trace-squared
// interactions into moment-dependent coefficients:
//   (1,0): w1 = 8 m3 + 4 g m1, w2 = 2(6 m2 + g), w3 = 8 m1, w4 = 2
//   (0,1): w1 = w3 = 0,        w2 = 2(6 m2 + g),            w4 = 2
inline QuarticPotential effective_potential(GeometryModel model, double g,
                                            const Moments& m) {
  switch (model) {
    case GeometryModel::Plus:
      return {8.0 * m.m3 + 4.0 * g * m.m1, 2.0 * (6.0 * m.m2 + g), 8.0 * m.m1,
              2.0};
    case GeometryModel::Minus:
      return {0.0, 2.0 * (6.0 * m.m2 + g), 0.0, 2.0};
    case GeometryModel::GaussianBaseline:
      break;
  }
  throw std::invalid_argument("effective_potential: baseline model has no coupling");
}

enum class Ansatz { Sym1Cut, Sym2Cut, Asym1Cut, Asym2Cut };

inline const char* to_string(Ansatz a) {
  switch (a) {
    case Ansatz::Sym1Cut: return "sym1";
    case Ansatz::Sym2Cut: return "sym2";
    case Ansatz::Asym1Cut: return "asym1";
    case Ansatz::Asym2Cut: return "asym2";
  }
  return "?";
}

// Unknowns of one candidate branch. Layout of x:
//   Sym1Cut : {b, m2}
//   Sym2Cut : {a, b}
//   Asym1Cut: {a, b, m1, m2, m3}
//   Asym2Cut: {a1, b1, a2, b2, m1, m2, m3}
struct CandidateParams {
  Ansatz ansatz = Ansatz::Sym1Cut;
  std::vector<double> x;

  static CandidateParams sym1(double b, double m2) {
    return {Ansatz::Sym1Cut, {b, m2}};
  }
  static CandidateParams sym2(double a, double b) {
    return {Ansatz::Sym2Cut, {a, b}};
  }
  static CandidateParams asym1(double a, double b, double m1, double m2,
                               double m3) {
    return {Ansatz::Asym1Cut, {a, b, m1, m2, m3}};
  }
  static CandidateParams asym2(double a1, double b1, double a2, double b2,
                               double m1, double m2, double m3) {
    return {Ansatz::Asym2Cut, {a1, b1, a2, b2, m1, m2, m3}};
  }

  bool two_cut() const {
    return ansatz == Ansatz::Sym2Cut || ansatz == Ansatz::Asym2Cut;
  }

  Moments moments() const {
    switch (ansatz) {
      case Ansatz::Sym1Cut: return {0.0, x[1], 0.0, {}};
      case Ansatz::Sym2Cut: {
        const TwoCutSupport s{-x[1], -x[0], x[0], x[1]};
        return {0.0, 4.0 * two_cut_coefficients(s)[5], 0.0, {}};
      }
      case Ansatz::Asym1Cut: return {x[2], x[3], x[4], {}};
      case Ansatz::Asym2Cut: return {x[4], x[5], x[6], {}};
    }
    return {};
  }

  OneCutSupport one_cut_support() const {
    if (ansatz == Ansatz::Sym1Cut) return {-x[0], x[0]};
    if (ansatz == Ansatz::Asym1Cut) return {x[0], x[1]};
    throw std::logic_error("not a 1-cut ansatz");
  }

  TwoCutSupport two_cut_support() const {
    if (ansatz == Ansatz::Sym2Cut) return {-x[1], -x[0], x[0], x[1]};
    if (ansatz == Ansatz::Asym2Cut) return {x[0], x[1], x[2], x[3]};
    throw std::logic_error("not a 2-cut ansatz");
  }

  // Ordering guards applied to every Newton iterate.
  bool ordering_ok() const {
    constexpr double kGap = 1e-10;
    switch (ansatz) {
      case Ansatz::Sym1Cut: return x[0] > kGap;
      case Ansatz::Sym2Cut: return x[0] > kGap && x[0] + kGap < x[1];
      case Ansatz::Asym1Cut: return x[0] + kGap < x[1];
      case Ansatz::Asym2Cut:
        return x[0] + kGap < x[1] && x[1] + kGap < x[2] && x[2] + kGap < x[3];
    }
    return false;
  }
};

// Mirror image x -> -x of a candidate (support reflected, odd moments negated).
inline CandidateParams mirror(const CandidateParams& p) {
  switch (p.ansatz) {
    case Ansatz::Sym1Cut:
    case Ansatz::Sym2Cut:
      return p;
    case Ansatz::Asym1Cut:
      return CandidateParams::asym1(-p.x[1], -p.x[0], -p.x[2], p.x[3], -p.x[4]);
    case Ansatz::Asym2Cut:
      return CandidateParams::asym2(-p.x[3], -p.x[2], -p.x[1], -p.x[0],
                                    -p.x[4], p.x[5], -p.x[6]);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Residual systems
// ---------------------------------------------------------------------------

// Seven conditions for the seven 2-cut parameters of the (1,0) model
// (the coupling symbol of the source system is read as g):
//   cond1  4c2 + 4c1(c1+3m1) + 2(g+6m2)      = 0
//   cond2  4c3 + 4c2(c1+3m1) + 2(g m1+2m3)   = 0
//   cond3  4c4 + 4c3(c1+3m1) - 1             = 0
//   cond4-6  4c_{n+4} + 4c_{n+3}(c1+3m1) = m_n
//   cond7  int_{b1}^{a2} sqrt(q) (x + c1 + 3m1) dx = 0
inline std::array<double, 7> residuals_10_two_cut(double g,
                                                  const CandidateParams& p) {
  const TwoCutSupport s = p.two_cut_support();
  check_support(s);
  const Moments m = p.moments();
  const auto c = two_cut_coefficients(s);
  const double t = c[0] + 3.0 * m.m1;
  const QuarticPotential w = effective_potential(GeometryModel::Plus, g, m);
  return {
      4.0 * c[1] + 4.0 * c[0] * t + 2.0 * (g + 6.0 * m.m2),
      4.0 * c[2] + 4.0 * c[1] * t + 2.0 * (g * m.m1 + 2.0 * m.m3),
      4.0 * c[3] + 4.0 * c[2] * t - 1.0,
      4.0 * c[4] + 4.0 * c[3] * t - m.m1,
      4.0 * c[5] + 4.0 * c[4] * t - m.m2,
      4.0 * c[6] + 4.0 * c[5] * t - m.m3,
      two_cut_gap_integral(w, s) / 8.0,
  };
}

// Five conditions for the five 1-cut parameters of the (1,0) model: the two
// boundary conditions of the effective potential plus the three moment
// self-consistency relations.
inline std::array<double, 5> residuals_10_one_cut(double g,
                                                  const CandidateParams& p) {
  const OneCutSupport s = p.one_cut_support();
  check_support(s);
  const Moments m = p.moments();
  const QuarticPotential w = effective_potential(GeometryModel::Plus, g, m);
  const auto [r1, r2] = one_cut_boundary_residuals(w, s);
  const Moments e = detail::expansion_moments(w, s);
  return {r1, r2, e.m1 - m.m1, e.m2 - m.m2, e.m3 - m.m3};
}

// Reduced symmetric systems (identical in both models).
inline std::array<double, 2> residuals_sym_two_cut(double g,
                                                   const CandidateParams& p) {
  const TwoCutSupport s = p.two_cut_support();
  const auto c = two_cut_coefficients(s);
  const double m2 = 4.0 * c[5];
  return {4.0 * c[1] + 2.0 * (g + 6.0 * m2), 4.0 * c[3] - 1.0};
}

inline std::array<double, 2> residuals_sym_one_cut(double g,
                                                   const CandidateParams& p) {
  const double b = p.x[0], m2 = p.x[1];
  const OneCutSupport s{-b, b};
  const QuarticPotential w =
      effective_potential(GeometryModel::Minus, g, {0.0, m2, 0.0, {}});
  const auto [r1, r2] = one_cut_boundary_residuals(w, s);
  (void)r1;  // identically zero for the symmetric ansatz
  const Moments e = detail::expansion_moments(w, s);
  return {r2, e.m2 - m2};
}

inline std::vector<double> residuals(GeometryModel model, Ansatz ansatz,
                                     double g, const CandidateParams& p) {
  if (model == GeometryModel::GaussianBaseline)
    throw std::invalid_argument("baseline model has no equilibrium system");
  switch (ansatz) {
    case Ansatz::Sym1Cut: {
      const auto r = residuals_sym_one_cut(g, p);
      return {r.begin(), r.end()};
    }
    case Ansatz::Sym2Cut: {
      const auto r = residuals_sym_two_cut(g, p);
      return {r.begin(), r.end()};
    }
    case Ansatz::Asym1Cut: {
      if (model != GeometryModel::Plus)
        throw std::invalid_argument("asymmetric ansatz only applies to (1,0)");
      const auto r = residuals_10_one_cut(g, p);
      return {r.begin(), r.end()};
    }
    case Ansatz::Asym2Cut: {
      if (model != GeometryModel::Plus)
        throw std::invalid_argument("asymmetric ansatz only applies to (1,0)");
      const auto r = residuals_10_two_cut(g, p);
      return {r.begin(), r.end()};
    }
  }
  throw std::logic_error("unknown ansatz");
}

// ---------------------------------------------------------------------------
// Damped Newton with forward-difference Jacobian
// ---------------------------------------------------------------------------

namespace detail {

// LU with partial pivoting for the small dense systems here (n <= 7).
class Lu {
 public:
  bool factorize(std::vector<double> a, int n) {
    a_ = std::move(a);
    n_ = n;
    piv_.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
      int p = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(at(r, c)) > std::abs(at(p, c))) p = r;
      piv_[static_cast<std::size_t>(c)] = p;
      if (p != c)
        for (int k = 0; k < n; ++k) std::swap(at(c, k), at(p, k));
      if (at(c, c) == 0.0) return false;
      for (int r = c + 1; r < n; ++r) {
        at(r, c) /= at(c, c);
        for (int k = c + 1; k < n; ++k) at(r, k) -= at(r, c) * at(c, k);
      }
    }
    return true;
  }

  std::vector<double> solve(std::vector<double> b) const {
    for (int c = 0; c < n_; ++c)
      std::swap(b[static_cast<std::size_t>(c)],
                b[static_cast<std::size_t>(piv_[static_cast<std::size_t>(c)])]);
    for (int r = 1; r < n_; ++r)
      for (int c = 0; c < r; ++c)
        b[static_cast<std::size_t>(r)] -= at(r, c) * b[static_cast<std::size_t>(c)];
    for (int r = n_ - 1; r >= 0; --r) {
      for (int c = r + 1; c < n_; ++c)
        b[static_cast<std::size_t>(r)] -= at(r, c) * b[static_cast<std::size_t>(c)];
      b[static_cast<std::size_t>(r)] /= at(r, r);
    }
    return b;
  }

 private:
  double& at(int r, int c) { return a_[static_cast<std::size_t>(r * n_ + c)]; }
  double at(int r, int c) const {
    return a_[static_cast<std::size_t>(r * n_ + c)];
  }
  std::vector<double> a_;
  std::vector<int> piv_;
  int n_ = 0;
};

inline double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

struct NewtonOptions {
  double tol = 1e-12;
  int max_iterations = 100;
  int max_halvings = 30;
  double cond_limit = 1e14;
};

enum class NewtonStatus { Converged, NoDecrease, MaxIterations, SingularJacobian };

struct NewtonResult {
  NewtonStatus status = NewtonStatus::MaxIterations;
  std::vector<double> x;
  double norm = 0.0;
  int iterations = 0;

  bool converged() const { return status == NewtonStatus::Converged; }
};

// Damped Newton iteration: forward-difference Jacobian with step
// 1e-7 max(1,|x_i|), step halving (up to max_halvings) whenever the residual
// norm does not decrease or the ordering constraint breaks.
template <class F, class Ok>
NewtonResult newton_solve(F&& residual, std::vector<double> x0, Ok&& ok,
                          NewtonOptions opts = {}) {
  if (!ok(x0)) throw std::invalid_argument("newton_solve: start violates constraints");
  const int n = static_cast<int>(x0.size());
  NewtonResult best;
  best.x = x0;
  std::vector<double> f = residual(x0);
  if (static_cast<int>(f.size()) != n)
    throw std::invalid_argument("newton_solve: system is not square");
  double norm = detail::inf_norm(f);
  best.norm = norm;

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (norm < opts.tol) {
      best.status = NewtonStatus::Converged;
      best.iterations = it;
      return best;
    }
    // forward-difference Jacobian, column by column
    std::vector<double> jac(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(best.x[static_cast<std::size_t>(j)]));
      std::vector<double> xp = best.x;
      xp[static_cast<std::size_t>(j)] += h;
      const std::vector<double> fp = residual(xp);
      for (int i = 0; i < n; ++i)
        jac[static_cast<std::size_t>(i * n + j)] =
            (fp[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(i)]) / h;
    }
    // condition estimate in the infinity norm via explicit inverse columns
    double norm_j = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j)
        row += std::abs(jac[static_cast<std::size_t>(i * n + j)]);
      norm_j = std::max(norm_j, row);
    }
    detail::Lu lu;
    if (!lu.factorize(jac, n)) {
      best.status = NewtonStatus::SingularJacobian;
      best.iterations = it;
      return best;
    }
    std::vector<double> inv_row_sums(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
      std::vector<double> e(static_cast<std::size_t>(n), 0.0);
      e[static_cast<std::size_t>(j)] = 1.0;
      const std::vector<double> col = lu.solve(std::move(e));
      for (int i = 0; i < n; ++i)
        inv_row_sums[static_cast<std::size_t>(i)] += std::abs(col[static_cast<std::size_t>(i)]);
    }
    double norm_jinv = 0.0;
    for (double r : inv_row_sums) norm_jinv = std::max(norm_jinv, r);
    if (norm_j * norm_jinv > opts.cond_limit) {
      best.status = NewtonStatus::SingularJacobian;
      best.iterations = it;
      return best;
    }

    const std::vector<double> step = lu.solve(f);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
      std::vector<double> xt = best.x;
      for (int j = 0; j < n; ++j)
        xt[static_cast<std::size_t>(j)] -= t * step[static_cast<std::size_t>(j)];
      if (!ok(xt)) continue;
      std::vector<double> ft = residual(xt);
      const double nt = detail::inf_norm(ft);
      if (nt < norm) {
        best.x = std::move(xt);
        f = std::move(ft);
        norm = nt;
        best.norm = norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      best.status = NewtonStatus::NoDecrease;
      best.iterations = it;
      return best;
    }
  }
  best.status = norm < opts.tol ? NewtonStatus::Converged : NewtonStatus::MaxIterations;
  best.iterations = opts.max_iterations;
  return best;
}

inline NewtonResult solve_candidate(GeometryModel model, double g,
                                    const CandidateParams& start,
                                    NewtonOptions opts = {}) {
  CandidateParams probe = start;
  auto fn = [&](const std::vector<double>& x) {
    probe.x = x;
    return residuals(model, start.ansatz, g, probe);
  };
  auto ok = [&](const std::vector<double>& x) {
    CandidateParams c = start;
    c.x = x;
    return c.ordering_ok();
  };
  return newton_solve(fn, start.x, ok, opts);
}

// ---------------------------------------------------------------------------
// Broken-symmetry branch of the (1,0) model
// ---------------------------------------------------------------------------

// Anchor for the branch with m1 > 0 at g = -6: a deterministic starting point
// well inside the Newton basin. (The naive two-well ansatz lands on the
// symmetric solution; the basin of the broken branch requires a lopsided
// minority cut, so the anchor is pinned numerically and certified by the
// residual norm after the solve.)
inline CandidateParams asym2cut_seed() {
  return CandidateParams::asym2(-2.4487, -2.3925, 0.5263, 1.1260,  //
                                0.8204, 0.7789, 0.5442);
}
inline constexpr double kAsym2CutSeedCoupling = -6.0;

// Path-follower for the broken-symmetry 2-cut branch. Each solved coupling
// seeds its neighbours; requests beyond the fold where Newton stops
// converging return nullopt.
class Asym2CutBranch {
 public:
  Asym2CutBranch() = default;

  std::optional<CandidateParams> at(double g) {
    if (!seeded_) {
      const NewtonResult r = solve_candidate(GeometryModel::Plus,
                                             kAsym2CutSeedCoupling,
                                             asym2cut_seed());
      if (!r.converged())
        throw seed_failure("broken-symmetry branch seed did not converge");
      store(kAsym2CutSeedCoupling, r.x);
      seeded_ = true;
    }
    const auto hit = solved_.find(key(g));
    if (hit != solved_.end()) return unpack(hit->second);
    if (failed_.count(key(g))) return std::nullopt;

    // nearest solved coupling as the path start
    double g0 = kAsym2CutSeedCoupling;
    double dist = std::abs(g - g0);
    for (const auto& [k, v] : solved_) {
      const double gg = static_cast<double>(k) / kScale;
      if (std::abs(g - gg) < dist) {
        dist = std::abs(g - gg);
        g0 = gg;
      }
    }
    std::vector<double> x = solved_.at(key(g0));
    double cur = g0;
    double step = (g > cur) ? kStep : -kStep;
    while (std::abs(cur - g) > 1e-14) {
      double next = (std::abs(g - cur) <= std::abs(step)) ? g : cur + step;
      NewtonResult r = solve_candidate(GeometryModel::Plus, next,
                                       {Ansatz::Asym2Cut, x});
      if (!r.converged()) {
        // halve the continuation step a few times before giving up
        bool rescued = false;
        double fine = step * 0.5;
        while (std::abs(fine) >= 1e-4) {
          const double mid = cur + std::copysign(
              std::min(std::abs(fine), std::abs(g - cur)), step);
          NewtonResult rm =
              solve_candidate(GeometryModel::Plus, mid, {Ansatz::Asym2Cut, x});
          if (rm.converged()) {
            store(mid, rm.x);
            x = rm.x;
            cur = mid;
            rescued = true;
            break;
          }
          fine *= 0.5;
        }
        if (!rescued) {
          failed_.insert(key(g));
          return std::nullopt;
        }
        continue;
      }
      store(next, r.x);
      x = r.x;
      cur = next;
    }
    return unpack(x);
  }

  // furthest coupling toward +inf the branch could be continued to
  double last_good_at_or_below(double g) const {
    double best = -1e30;
    for (const auto& [k, v] : solved_) {
      const double gg = static_cast<double>(k) / kScale;
      if (gg <= g + 1e-12) best = std::max(best, gg);
    }
    return best;
  }

 private:
  static constexpr double kScale = 1e10;
  static constexpr double kStep = 0.05;
  static long long key(double g) {
    return static_cast<long long>(std::llround(g * kScale));
  }
  void store(double g, std::vector<double> x) { solved_[key(g)] = std::move(x); }
  static CandidateParams unpack(const std::vector<double>& x) {
    return {Ansatz::Asym2Cut, x};
  }

  std::map<long long, std::vector<double>> solved_;
  std::set<long long> failed_;
  bool seeded_ = false;
};

}  // namespace bgrmt
