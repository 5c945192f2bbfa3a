// End-to-end checks of the command-line tool: exit codes, file formats,
// and reproducibility of deterministic commands.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli;
int g_failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::printf("[FAIL] %s\n", what.c_str());
    ++g_failures;
  } else {
    std::printf("[ ok ] %s\n", what.c_str());
  }
}

int run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: cli_integration <path-to-cli>\n");
    return 2;
  }
  g_cli = argv[1];
  const fs::path base = fs::temp_directory_path() / "bgrmt_cli_test";
  fs::remove_all(base);
  fs::create_directories(base);

  // ---- critical, (0,1): exact analytic value
  {
    const fs::path dir = base / "crit01";
    expect(run("critical --model 01 --out " + dir.string()) == 0,
           "critical 01 exits 0");
    const json j = load_json(dir / "critical.json");
    expect(std::abs(j["g_critical"].get<double>() + 4.0 * std::sqrt(2.0)) < 1e-9,
           "critical 01 = -4 sqrt 2");
    const json man = load_json(dir / "critical_manifest.json");
    expect(man["command"] == "critical", "manifest records the command");
    expect(!man["outputs"].empty(), "manifest lists outputs");
  }

  // ---- equilibrium, (0,1) at g=-7: symmetric 2-cut
  {
    const fs::path dir = base / "eq01";
    expect(run("equilibrium --model 01 --g -7 --out " + dir.string()) == 0,
           "equilibrium 01 g=-7 exits 0");
    const json j = load_json(dir / "equilibrium_solution.json");
    expect(j["ansatz"] == "sym2", "2-cut ansatz chosen at g=-7");
    expect(std::abs(j["support"]["a2"].get<double>() - 0.409753) < 1e-5,
           "inner edge 0.409753");
    expect(std::abs(j["support"]["b2"].get<double>() - 1.257828) < 1e-5,
           "outer edge 1.257828");
    expect(std::abs(j["moments"]["m2"].get<double>() - 0.875) < 1e-9,
           "m2 = 0.875");
    expect(fs::exists(dir / "equilibrium_density.csv"), "density CSV written");

    // deterministic command: bit-identical outputs on a re-run
    const std::string first = slurp(dir / "equilibrium_density.csv");
    const fs::path dir2 = base / "eq01_again";
    run("equilibrium --model 01 --g -7 --out " + dir2.string());
    expect(first == slurp(dir2 / "equilibrium_density.csv"),
           "re-run is bit-identical");
    expect(first.find(',') != std::string::npos &&
               first.find(';') == std::string::npos,
           "CSV uses dot-decimal comma-separated values");
  }

  // ---- equilibrium, (1,0): branch selection on both sides of the transition
  {
    const fs::path dir = base / "eq10a";
    expect(run("equilibrium --model 10 --g -3 --out " + dir.string()) == 0,
           "equilibrium 10 g=-3 exits 0");
    expect(load_json(dir / "equilibrium_solution.json")["ansatz"] == "sym1",
           "1-cut wins at g=-3");

    const fs::path dir2 = base / "eq10b";
    expect(run("equilibrium --model 10 --g -4 --out " + dir2.string()) == 0,
           "equilibrium 10 g=-4 exits 0");
    const json j = load_json(dir2 / "equilibrium_solution.json");
    expect(j["ansatz"] == "asym2", "broken 2-cut wins at g=-4");
    expect(j["moments"]["m1"].get<double>() > 0.2, "m1 > 0 reported");
    expect(j["symmetry_broken"].get<bool>(), "symmetry flagged as broken");
    expect(fs::exists(dir2 / "equilibrium_mean_dos.csv"),
           "symmetrized mean density written");
  }

  // ---- scan, (0,1): m2 continuous across the critical coupling
  {
    const fs::path dir = base / "scan01";
    expect(run("scan --model 01 --from -5.2 --to -6.2 --step -0.05 --out " +
               dir.string()) == 0,
           "scan exits 0");
    std::ifstream in(dir / "scan.csv");
    std::string line;
    std::getline(in, line);
    expect(line == "g,ansatz,a1,b1,a2,b2,m1,m2,m3,ell,free_energy,chosen,status",
           "scan CSV header");
    double prev_m2 = 0.0;
    bool first = true, continuous = true;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() < 13 || cells[11] != "1") continue;
      const double g = std::stod(cells[0]);
      const double m2 = std::stod(cells[7]);
      // below the transition the linear law holds exactly
      if (g <= -4.0 * std::sqrt(2.0) && std::abs(m2 + g / 8.0) > 1e-9)
        continuous = false;
      if (!first && std::abs(m2 - prev_m2) > 0.05) continuous = false;
      prev_m2 = m2;
      first = false;
    }
    expect(continuous, "chosen-branch m2 is continuous across -4 sqrt 2");

    expect(run("scan --model 01 --from -5 --to -6 --step 0 --out " +
               (base / "scan_bad").string()) == 2,
           "zero step is a usage error");
  }

  // ---- critical, (1,0)
  {
    const fs::path dir = base / "crit10";
    expect(run("critical --model 10 --bracket -3.4 -3.0 --out " +
               dir.string()) == 0,
           "critical 10 exits 0");
    const double gcr = load_json(dir / "critical.json")["g_critical"];
    expect(gcr > -3.20 && gcr < -3.17, "critical 10 in [-3.20, -3.17]");

    expect(run("critical --model 10 --bracket -2.0 -1.0 --out " +
               (base / "crit_bad").string()) == 3,
           "bad bracket is a numerical error (exit 3)");
  }

  // ---- mc + checkpoint round trip + compare
  {
    const fs::path dir = base / "mc_gue";
    expect(run("mc --model gue --N 32 --sweeps 3000 --burnin 500 --seed 5 "
               "--out " + dir.string()) == 0,
           "mc gue exits 0");
    expect(fs::exists(dir / "mc_histogram.csv"), "histogram written");
    expect(count_lines(dir / "mc_trace.csv") == 3000 - 500 + 1,
           "trace has one row per sampled sweep");
    expect(fs::exists(dir / "mc_checkpoint.bin") &&
               fs::exists(dir / "mc_checkpoint.bin.meta"),
           "checkpoint and sidecar written");

    // restart from the checkpoint
    const fs::path dir2 = base / "mc_restart";
    expect(run("mc --model gue --N 32 --sweeps 1000 --burnin 100 --seed 6 "
               "--init file:" + (dir / "mc_checkpoint.bin").string() +
               " --out " + dir2.string()) == 0,
           "mc restarts from a checkpoint");

    // compare a file with itself: all metrics vanish
    const fs::path dir3 = base / "cmp";
    expect(run("compare " + (dir / "mc_histogram.csv").string() + " " +
               (dir / "mc_histogram.csv").string() + " --out " +
               dir3.string()) == 0,
           "compare exits 0");
    const json j = load_json(dir3 / "compare_metrics.json");
    expect(j["l1_distance"].get<double>() == 0.0 &&
               j["sup_norm"].get<double>() == 0.0,
           "identical files give zero metrics");
    expect(j["resampled"].get<bool>() == false, "same grid not resampled");
  }

  // ---- usage / domain errors
  {
    expect(run("equilibrium --model gue --g 0 --out " +
               (base / "bad1").string()) == 4,
           "equilibrium on the baseline is a domain error (exit 4)");
    expect(run("mc --model 01 --N 1 --out " + (base / "bad2").string()) == 2,
           "invalid N is a usage error (exit 2)");
    expect(run("definitely-not-a-command") == 2, "unknown command exits 2");
  }

  std::printf("%s: %d check(s) failed\n",
              g_failures == 0 ? "CLI INTEGRATION PASSED" : "CLI INTEGRATION FAILED",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
