// Command-line front end: equilibrium solves, coupling scans, critical
// couplings, Metropolis runs, and comparison metrics. Emits CSV/JSON plot
// data plus a manifest per command.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bgrmt/bgrmt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bgrmt;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes: 0 ok, 2 usage, 3 numerical failure, 4 model-domain error
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitDomain = 4;

std::string fmt17(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// written via a temp file plus rename so readers never see partial output
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
  }
  fs::rename(tmp, path);
}

class Manifest {
 public:
  Manifest(std::string command, fs::path out_dir)
      : out_dir_(std::move(out_dir)), start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = kVersion;
    doc_["parameters"] = json::object();
    doc_["outputs"] = json::array();
    fs::create_directories(out_dir_);
  }

  template <class T>
  void param(const std::string& key, const T& value) {
    doc_["parameters"][key] = value;
  }

  fs::path reserve(const std::string& name) {
    doc_["outputs"].push_back(name);
    return out_dir_ / name;
  }

  void finish(const std::string& manifest_name) {
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    doc_["wall_clock_seconds"] = elapsed;
    write_file_atomic(out_dir_ / manifest_name, doc_.dump(2) + "\n");
  }

  json& doc() { return doc_; }
  const fs::path& dir() const { return out_dir_; }

 private:
  json doc_;
  fs::path out_dir_;
  std::chrono::steady_clock::time_point start_;
};

GeometryModel parse_model(const std::string& s) {
  if (s == "10") return GeometryModel::Plus;
  if (s == "01") return GeometryModel::Minus;
  if (s == "gue") return GeometryModel::GaussianBaseline;
  throw CLI::ValidationError("--model", "must be one of 10|01|gue");
}

std::string density_csv(const SpectralDensity& d, int samples_per_cut = 512) {
  std::string csv = "lambda,rho\n";
  for (const DensityCut& c : d.cuts()) {
    for (int i = 0; i <= samples_per_cut; ++i) {
      const double x = c.lo + (c.hi - c.lo) * i / samples_per_cut;
      csv += fmt17(x) + "," + fmt17(d.value(x)) + "\n";
    }
  }
  return csv;
}

json support_json(const EquilibriumSolution& sol) {
  json s = json::object();
  if (sol.params.two_cut()) {
    const TwoCutSupport t = sol.params.two_cut_support();
    s["a1"] = t.a1;
    s["b1"] = t.b1;
    s["a2"] = t.a2;
    s["b2"] = t.b2;
  } else {
    const OneCutSupport o = sol.params.one_cut_support();
    s["a"] = o.a;
    s["b"] = o.b;
  }
  return s;
}

json solution_json(const EquilibriumSolution& sol) {
  json j;
  j["model"] = to_string(sol.model);
  j["g"] = sol.g;
  j["ansatz"] = to_string(sol.ansatz);
  j["support"] = support_json(sol);
  j["moments"] = {{"m1", sol.moments.m1},
                  {"m2", sol.moments.m2},
                  {"m3", sol.moments.m3},
                  {"m4", sol.moments.m4.value_or(0.0)}};
  j["lagrange"] = sol.lagrange;
  j["lagrange_spread"] = sol.lagrange_spread;
  j["free_energy"] = sol.energy;
  return j;
}

// all candidate branches that exist at (model, g)
std::vector<EquilibriumSolution> candidates_at(GeometryModel model, double g,
                                               const std::string& ansatz) {
  std::vector<EquilibriumSolution> out;
  auto want = [&](const char* name) {
    return ansatz == "auto" || ansatz == name;
  };
  if (want("sym1") && g >= kCritical01) {
    const auto s = solve_one_cut_01(g).params;
    out.push_back(make_solution(model, g, CandidateParams::sym1(s.b, s.m2)));
  }
  if (want("sym2") && g <= kCritical01) {
    const auto s = solve_two_cut_01(g).params;
    out.push_back(make_solution(model, g, CandidateParams::sym2(s.a, s.b)));
  }
  if (want("asym2") && model == GeometryModel::Plus && g < 0.0) {
    Asym2CutBranch branch;
    if (const auto p = branch.at(g))
      out.push_back(make_solution(model, g, *p));
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_equilibrium(GeometryModel model, double g, const std::string& ansatz,
                    const fs::path& out_dir) {
  if (model == GeometryModel::GaussianBaseline) {
    std::fprintf(stderr, "equilibrium: the gue mode has no coupling; use 10 or 01\n");
    return kExitDomain;
  }
  Manifest man("equilibrium", out_dir);
  man.param("model", to_string(model));
  man.param("g", g);
  man.param("ansatz", ansatz);

  std::vector<EquilibriumSolution> cands;
  try {
    cands = candidates_at(model, g, ansatz);
  } catch (const seed_failure&) {
    // asym branch unavailable: fall through with whatever exists
    cands = candidates_at(model, g, ansatz == "asym2" ? "none" : "auto");
  }
  if (cands.empty()) {
    std::fprintf(stderr, "equilibrium: no branch converged at g=%g\n", g);
    return kExitNumerical;
  }
  const Selection sel = select_equilibrium(cands);

  json j = solution_json(sel.solution);
  j["degenerate"] = sel.degenerate;
  j["symmetry_broken"] = sel.symmetry_broken;
  j["candidates"] = json::array();
  for (const auto& c : cands)
    j["candidates"].push_back(
        {{"ansatz", to_string(c.ansatz)}, {"free_energy", c.energy}});

  write_file_atomic(man.reserve("equilibrium_density.csv"),
                    density_csv(sel.solution.density));
  if (sel.mean_dos) {
    // the mean DOS covers the support together with its mirror image
    const double lo = std::min(sel.solution.density.support_lo(),
                               -sel.solution.density.support_hi());
    const double hi = std::max(sel.solution.density.support_hi(),
                               -sel.solution.density.support_lo());
    std::string csv = "lambda,rho\n";
    for (int i = 0; i <= 2048; ++i) {
      const double x = lo + (hi - lo) * i / 2048.0;
      csv += fmt17(x) + "," + fmt17((*sel.mean_dos)(x)) + "\n";
    }
    write_file_atomic(man.reserve("equilibrium_mean_dos.csv"), csv);
    j["mean_dos_file"] = "equilibrium_mean_dos.csv";
  }
  write_file_atomic(man.reserve("equilibrium_solution.json"), j.dump(2) + "\n");
  man.finish("equilibrium_manifest.json");
  std::printf("ansatz=%s E=%s m1=%s m2=%s\n", to_string(sel.solution.ansatz),
              fmt17(sel.solution.energy).c_str(),
              fmt17(sel.solution.moments.m1).c_str(),
              fmt17(sel.solution.moments.m2).c_str());
  return 0;
}

int cmd_scan(GeometryModel model, double g_from, double g_to, double step,
             const fs::path& out_dir) {
  if (model == GeometryModel::GaussianBaseline) {
    std::fprintf(stderr, "scan: use model 10 or 01\n");
    return kExitDomain;
  }
  if (step == 0.0) {
    std::fprintf(stderr, "scan: step must be non-zero\n");
    return kExitUsage;
  }
  Manifest man("scan", out_dir);
  man.param("model", to_string(model));
  man.param("g_from", g_from);
  man.param("g_to", g_to);
  man.param("step", step);

  PhaseReport rep;
  try {
    rep = phase_report(model, g_from, g_to, step);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "scan: %s\n", e.what());
    return kExitUsage;
  }

  std::string csv =
      "g,ansatz,a1,b1,a2,b2,m1,m2,m3,ell,free_energy,chosen,status\n";
  for (const PhasePoint& pt : rep.points) {
    for (std::size_t i = 0; i < pt.candidates.size(); ++i) {
      const EquilibriumSolution& c = pt.candidates[i];
      std::string a1, b1, a2, b2;
      if (c.params.two_cut()) {
        const TwoCutSupport s = c.params.two_cut_support();
        a1 = fmt17(s.a1);
        b1 = fmt17(s.b1);
        a2 = fmt17(s.a2);
        b2 = fmt17(s.b2);
      } else {
        const OneCutSupport s = c.params.one_cut_support();
        a2 = fmt17(s.a);
        b2 = fmt17(s.b);
      }
      csv += fmt17(pt.g) + "," + to_string(c.ansatz) + "," + a1 + "," + b1 +
             "," + a2 + "," + b2 + "," + fmt17(c.moments.m1) + "," +
             fmt17(c.moments.m2) + "," + fmt17(c.moments.m3) + "," +
             fmt17(c.lagrange) + "," + fmt17(c.energy) + "," +
             (i == pt.chosen ? "1" : "0") + "," +
             (pt.degenerate ? "degenerate" : "ok") + "\n";
    }
  }
  write_file_atomic(man.reserve("scan.csv"), csv);
  if (rep.critical_g)
    man.doc()["summary"] = {{"g_critical", *rep.critical_g}};
  man.finish("scan_manifest.json");
  return 0;
}

int cmd_critical(GeometryModel model, std::optional<std::pair<double, double>> bracket,
                 const fs::path& out_dir) {
  Manifest man("critical", out_dir);
  man.param("model", to_string(model));
  double gcr = 0.0;
  try {
    if (model == GeometryModel::Minus) {
      gcr = locate_critical(GeometryModel::Minus);
    } else if (model == GeometryModel::Plus) {
      const double lo = bracket ? bracket->first : -3.4;
      const double hi = bracket ? bracket->second : -3.0;
      man.param("bracket", std::vector<double>{lo, hi});
      gcr = locate_critical(GeometryModel::Plus, lo, hi);
    } else {
      std::fprintf(stderr, "critical: use model 10 or 01\n");
      return kExitDomain;
    }
  } catch (const no_sign_change& e) {
    std::fprintf(stderr, "critical: %s\n", e.what());
    return kExitNumerical;
  }
  json j;
  j["model"] = to_string(model);
  j["g_critical"] = gcr;
  write_file_atomic(man.reserve("critical.json"), j.dump(2) + "\n");
  man.finish("critical_manifest.json");
  std::printf("g_critical=%s\n", fmt17(gcr).c_str());
  return 0;
}

int cmd_mc(GeometryModel model, double g, int n, long sweeps, long burnin,
           double width, std::uint64_t seed, const std::string& init,
           const fs::path& out_dir) {
  Manifest man("mc", out_dir);
  man.param("model", to_string(model));
  man.param("g", g);
  man.param("N", n);
  man.param("sweeps", sweeps);
  man.param("burnin", burnin);
  man.param("width", width);
  man.param("seed", seed);
  man.param("init", init);

  McConfig cfg;
  cfg.model = model;
  cfg.g = g;
  cfg.n = n;
  cfg.sweeps = sweeps;
  cfg.burnin = burnin;
  cfg.width = width;
  cfg.seed = seed;

  if (init == "even") {
    cfg.init = McInit::EvenlySpaced;
  } else if (init == "from-theory") {
    cfg.init = McInit::FromDensity;
    if (model == GeometryModel::GaussianBaseline) {
      cfg.init_density = SpectralDensity({DensityCut{-2.0, 2.0, {0.5, 0.0, 0.0}}});
    } else {
      std::vector<EquilibriumSolution> cands;
      try {
        cands = candidates_at(model, g, "auto");
      } catch (const std::exception&) {
      }
      if (cands.empty()) {
        std::fprintf(stderr, "mc: no theory density available at g=%g\n", g);
        return kExitNumerical;
      }
      cfg.init_density = select_equilibrium(cands).solution.density;
    }
  } else if (init.rfind("file:", 0) == 0) {
    cfg.init = McInit::Explicit;
    try {
      cfg.init_values = read_checkpoint(init.substr(5)).values;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "mc: %s\n", e.what());
      return kExitUsage;
    }
  } else {
    std::fprintf(stderr, "mc: --init must be even|from-theory|file:PATH\n");
    return kExitUsage;
  }

  McTrace trace;
  try {
    trace = run_chain(cfg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "mc: %s\n", e.what());
    return kExitUsage;
  }

  const Histogram h = empirical_density(trace.pooled);
  std::string hist_csv = "bin_center,density\n";
  for (std::size_t i = 0; i < h.centers.size(); ++i)
    hist_csv += fmt17(h.centers[i]) + "," + fmt17(h.density[i]) + "\n";
  write_file_atomic(man.reserve("mc_histogram.csv"), hist_csv);

  std::string trace_csv = "sweep,M,m2,energy,acceptance\n";
  for (std::size_t i = 0; i < trace.order_param.size(); ++i)
    trace_csv += std::to_string(burnin + static_cast<long>(i)) + "," +
                 fmt17(trace.order_param[i]) + "," + fmt17(trace.m2[i]) + "," +
                 fmt17(trace.energy[i]) + "," + fmt17(trace.acceptance_rate) +
                 "\n";
  write_file_atomic(man.reserve("mc_trace.csv"), trace_csv);

  const fs::path ckpt = man.reserve("mc_checkpoint.bin");
  write_checkpoint(ckpt, trace.final_eigenvalues, model, g, sweeps, seed);
  man.doc()["outputs"].push_back("mc_checkpoint.bin.meta");

  double mean_e = 0.0;
  for (double e : trace.energy) mean_e += e;
  if (!trace.energy.empty()) mean_e /= static_cast<double>(trace.energy.size());
  man.doc()["summary"] = {{"acceptance_rate", trace.acceptance_rate},
                          {"mean_energy", mean_e},
                          {"final_width", trace.final_width},
                          {"max_energy_drift", trace.max_energy_drift}};
  man.finish("mc_manifest.json");
  std::printf("acceptance=%.3f mean_energy=%s\n", trace.acceptance_rate,
              fmt17(mean_e).c_str());
  return 0;
}

struct Curve {
  std::vector<double> x, y;
};

Curve read_two_column_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Curve c;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    c.x.push_back(std::stod(line.substr(0, comma)));
    c.y.push_back(std::stod(line.substr(comma + 1)));
  }
  if (c.x.size() < 2) throw std::runtime_error("not enough rows in " + path.string());
  return c;
}

double curve_at(const Curve& c, double x) {
  if (x <= c.x.front() || x >= c.x.back()) return 0.0;
  const auto it = std::upper_bound(c.x.begin(), c.x.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - c.x.begin());
  const double t = (x - c.x[i - 1]) / (c.x[i] - c.x[i - 1]);
  return (1.0 - t) * c.y[i - 1] + t * c.y[i];
}

int cmd_compare(const fs::path& theory_file, const fs::path& mc_file,
                const fs::path& out_dir) {
  Manifest man("compare", out_dir);
  man.param("theory", theory_file.string());
  man.param("mc", mc_file.string());

  Curve theory, mc;
  try {
    theory = read_two_column_csv(theory_file);
    mc = read_two_column_csv(mc_file);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "compare: %s\n", e.what());
    return kExitUsage;
  }

  const bool same_grid = theory.x.size() == mc.x.size() &&
                         std::equal(theory.x.begin(), theory.x.end(),
                                    mc.x.begin(), [](double a, double b) {
                                      return a == b;
                                    });
  const double lo = std::min(theory.x.front(), mc.x.front());
  const double hi = std::max(theory.x.back(), mc.x.back());
  const int fine = 20000;
  const double h = (hi - lo) / fine;
  double l1 = 0.0, sup = 0.0;
  double m1t = 0.0, m1m = 0.0, m2t = 0.0, m2m = 0.0;
  for (int i = 0; i < fine; ++i) {
    const double x = lo + (i + 0.5) * h;
    const double a = curve_at(theory, x), b = curve_at(mc, x);
    l1 += std::abs(a - b) * h;
    sup = std::max(sup, std::abs(a - b));
    m1t += x * a * h;
    m1m += x * b * h;
    m2t += x * x * a * h;
    m2m += x * x * b * h;
  }
  json j;
  j["l1_distance"] = l1;
  j["sup_norm"] = sup;
  j["moment_diff"] = {{"m1", m1m - m1t}, {"m2", m2m - m2t}};
  j["resampled"] = !same_grid;
  write_file_atomic(man.reserve("compare_metrics.json"), j.dump(2) + "\n");
  man.finish("compare_manifest.json");
  std::printf("l1=%s sup=%s\n", fmt17(l1).c_str(), fmt17(sup).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilibrium measures and eigenvalue Monte-Carlo for the "
               "(1,0)/(0,1) quartic matrix ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string model_str = "01";
  std::string ansatz = "auto";
  std::string init = "even";
  std::string out_dir = ".";
  double g = 0.0, g_from = 0.0, g_to = 0.0, step = 0.1;
  std::vector<double> bracket;
  int n = 64;
  long sweeps = 20000, burnin = 2000;
  double width = 0.5;
  std::uint64_t seed = 1;
  std::string theory_file, mc_file;

  auto* eq = app.add_subcommand("equilibrium", "solve the equilibrium measure");
  eq->add_option("--model", model_str, "10|01")->required();
  eq->add_option("--g", g, "coupling constant")->required();
  eq->add_option("--ansatz", ansatz, "sym1|sym2|asym2|auto")
      ->check(CLI::IsMember({"auto", "sym1", "sym2", "asym2"}));
  eq->add_option("--out", out_dir, "output directory");

  auto* sc = app.add_subcommand("scan", "sweep the coupling constant");
  sc->add_option("--model", model_str, "10|01")->required();
  sc->add_option("--from", g_from, "start coupling")->required();
  sc->add_option("--to", g_to, "end coupling")->required();
  sc->add_option("--step", step, "scan step");
  sc->add_option("--out", out_dir, "output directory");

  auto* cr = app.add_subcommand("critical", "locate the critical coupling");
  cr->add_option("--model", model_str, "10|01")->required();
  cr->add_option("--bracket", bracket, "LO HI")->expected(2);
  cr->add_option("--out", out_dir, "output directory");

  auto* mc = app.add_subcommand("mc", "run a Metropolis chain");
  mc->add_option("--model", model_str, "10|01|gue")->required();
  mc->add_option("--g", g, "coupling constant");
  mc->add_option("--N", n, "matrix size");
  mc->add_option("--sweeps", sweeps, "total sweeps");
  mc->add_option("--burnin", burnin, "burn-in sweeps");
  mc->add_option("--width", width, "initial proposal width");
  mc->add_option("--seed", seed, "RNG seed");
  mc->add_option("--init", init, "even|from-theory|file:PATH");
  mc->add_option("--out", out_dir, "output directory");

  auto* cp = app.add_subcommand("compare", "distance between two densities");
  cp->add_option("theory", theory_file, "theory density CSV")->required();
  cp->add_option("mc", mc_file, "MC histogram CSV")->required();
  cp->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const GeometryModel model = parse_model(model_str);
    if (eq->parsed()) return cmd_equilibrium(model, g, ansatz, out_dir);
    if (sc->parsed()) return cmd_scan(model, g_from, g_to, step, out_dir);
    if (cr->parsed()) {
      std::optional<std::pair<double, double>> br;
      if (!bracket.empty()) br = {bracket[0], bracket[1]};
      return cmd_critical(model, br, out_dir);
    }
    if (mc->parsed())
      return cmd_mc(model, g, n, sweeps, burnin, width, seed, init, out_dir);
    if (cp->parsed()) return cmd_compare(theory_file, mc_file, out_dir);
  } catch (const out_of_branch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDomain;
  } catch (const no_sign_change& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const seed_failure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const non_admissible_density& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDomain;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitUsage;
}
