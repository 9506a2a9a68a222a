// End-to-end tests of the clssr_sim binary. The test runner exports
// CLSSR_SIM_BIN with the built executable's path; every case shells out and
// inspects exit codes and produced files.

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string binary_path() {
  const char* bin = std::getenv("CLSSR_SIM_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "CLSSR_SIM_BIN must point at clssr_sim");
  return bin;
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  static std::atomic<int> invocation{0};
  const fs::path log =
      fs::temp_directory_path() /
      ("clssr_cli_" + std::to_string(::getpid()) + "_" +
       std::to_string(invocation.fetch_add(1)) + ".log");
  const std::string cmd =
      binary_path() + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  fs::remove(log);
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A scratch directory wiped on construction.
fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Minimal scenario file: the built-in small scenario with a short episode
// count so CLI cases stay fast.
fs::path write_small_config(const fs::path& dir) {
  const fs::path path = dir / "scenario.json";
  std::ofstream out(path);
  out << R"({
    "geometry": {"eves": [[400.0, 450.0]]},
    "antennas": {"rx": 1},
    "discretization": {"codeword_classes": 3, "fading_bins_user": 2,
                       "fading_bins_eve": 2},
    "source": {"persistence": 0.6},
    "codebook": {"levels": 2, "power_fracs": [1.0], "bit_choices": [8]},
    "pretrain": {"draws": 256},
    "episodes": 300
  })";
  return path;
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (const char c : text)
    if (c == '\n') ++lines;
  return lines;
}

}  // namespace

TEST_CASE("run writes a snapshot table and a solve report") {
  const fs::path dir = fresh_dir("clssr_cli_run");
  const fs::path cfg = write_small_config(dir);
  const RunResult r = run_cli("run --config " + cfg.string() + " --out " +
                              (dir / "out").string());
  CHECK(r.exit_code == 0);

  const std::string csv = slurp(dir / "out" / "snapshot.csv");
  CHECK(count_lines(csv) == 301);  // header + one row per episode
  CHECK(csv.rfind("tau,scheme,r_u,", 0) == 0);

  const std::string report = slurp(dir / "out" / "solve_report.json");
  CHECK(report.find("\"policy\"") != std::string::npos);
  CHECK(report.find("\"value_trace\"") != std::string::npos);
}

TEST_CASE("run accepts scheme, tau, seed and episode overrides") {
  const fs::path dir = fresh_dir("clssr_cli_run_opts");
  const fs::path cfg = write_small_config(dir);
  const RunResult r = run_cli("run --config " + cfg.string() +
                              " --scheme plss --tau 3 --episodes 50 --seed 9"
                              " --out " +
                              (dir / "out").string());
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir / "out" / "snapshot.csv");
  CHECK(count_lines(csv) == 51);
  CHECK(csv.find("\n3,plss,") != std::string::npos);
}

TEST_CASE("config problems exit with code 2") {
  const fs::path dir = fresh_dir("clssr_cli_bad");
  const fs::path cfg = write_small_config(dir);

  SUBCASE("missing file") {
    const RunResult r = run_cli("run --config /nonexistent.json");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("unknown scheme") {
    const RunResult r =
        run_cli("run --config " + cfg.string() + " --scheme qkd");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("qkd") != std::string::npos);
  }
  SUBCASE("unknown key in the config") {
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"episodess": 10})";
    const RunResult r = run_cli("run --config " + bad.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("episodess") != std::string::npos);
  }
  SUBCASE("malformed json") {
    const fs::path bad = dir / "malformed.json";
    std::ofstream(bad) << "{ not json";
    const RunResult r = run_cli("run --config " + bad.string());
    CHECK(r.exit_code == 2);
  }
  SUBCASE("empty tau list") {
    const RunResult r =
        run_cli("sweep --config " + cfg.string() + " --tau ,");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("unparsable tau") {
    const RunResult r =
        run_cli("sweep --config " + cfg.string() + " --tau 1,two");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("two") != std::string::npos);
  }
  SUBCASE("missing required option") {
    const RunResult r = run_cli("run");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("no subcommand") {
    const RunResult r = run_cli("");
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("infeasible pretraining grids exit with code 3") {
  const fs::path dir = fresh_dir("clssr_cli_infeasible");
  const fs::path cfg = dir / "rigged.json";
  // An eavesdropper right next to the transmitter never misdecodes, so with
  // the noise grid pinned to zero no level can deny it.
  std::ofstream(cfg) << R"({
    "geometry": {"eves": [[5.0, 5.0]]},
    "antennas": {"rx": 1},
    "discretization": {"codeword_classes": 3, "fading_bins_user": 2,
                       "fading_bins_eve": 2},
    "codebook": {"levels": 2, "power_fracs": [1.0], "bit_choices": [8]},
    "pretrain": {"grid": [0.0], "draws": 64},
    "episodes": 100
  })";
  const RunResult r = run_cli("run --config " + cfg.string() + " --out " +
                              (dir / "out").string());
  CHECK(r.exit_code == 3);
}

TEST_CASE("sweep emits all four artifacts with one row per cell") {
  const fs::path dir = fresh_dir("clssr_cli_sweep");
  const fs::path cfg = write_small_config(dir);
  const std::string out = (dir / "out").string();
  const RunResult r = run_cli("sweep --config " + cfg.string() +
                              " --tau 1,2 --episodes 200 --out " + out);
  CHECK(r.exit_code == 0);

  const std::string csv = slurp(dir / "out" / "sweep.csv");
  CHECK(count_lines(csv) == 7);  // header + 2 taus x 3 schemes
  CHECK(csv.find(",clss,") != std::string::npos);
  CHECK(csv.find(",plss,") != std::string::npos);
  CHECK(csv.find(",ao,") != std::string::npos);

  CHECK(fs::exists(dir / "out" / "sweep.json"));
  CHECK(fs::exists(dir / "out" / "reliability.json"));
  const std::string rel = slurp(dir / "out" / "reliability.csv");
  CHECK(rel.rfind("scheme,seed,iteration,reliability_pct", 0) == 0);
  CHECK(count_lines(rel) >= 4);  // three schemes, at least one point each

  // Repeating the sweep reproduces the files byte for byte.
  const std::string out2 = (dir / "out2").string();
  const RunResult again = run_cli("sweep --config " + cfg.string() +
                                  " --tau 1,2 --episodes 200 --out " + out2);
  CHECK(again.exit_code == 0);
  CHECK(slurp(dir / "out" / "sweep.csv") == slurp(dir / "out2" / "sweep.csv"));
  CHECK(slurp(dir / "out" / "reliability.csv") ==
        slurp(dir / "out2" / "reliability.csv"));
}

TEST_CASE("oracle suite passes on the built-in scenario") {
  const RunResult r = run_cli("oracle");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("[FAIL]") == std::string::npos);
  // All six checks report.
  CHECK(count_lines(r.output) == 6);
  CHECK(r.output.find("[PASS] reward tensor") != std::string::npos);
  CHECK(r.output.find("[PASS] policy iteration matches exhaustive search") !=
        std::string::npos);
}

TEST_CASE("oracle negative control trips the reward check") {
  const RunResult r = run_cli("oracle --tamper-reward");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find(
            "[FAIL] reward tensor matches pipeline recomputation") !=
        std::string::npos);
}

TEST_CASE("oracle refuses over-budget exhaustive search unless told to skip") {
  const fs::path dir = fresh_dir("clssr_cli_oracle_budget");
  // The full-size scenario has 27 actions over 48 states: far over budget.
  const fs::path cfg = dir / "full.json";
  std::ofstream(cfg) << R"({"episodes": 100, "pretrain": {"draws": 64}})";

  const RunResult refused = run_cli("oracle --config " + cfg.string());
  CHECK(refused.exit_code == 4);
  CHECK(refused.output.find("--skip-exhaustive") != std::string::npos);

  const RunResult skipped =
      run_cli("oracle --config " + cfg.string() + " --skip-exhaustive");
  CHECK(skipped.exit_code == 0);
  CHECK(skipped.output.find("[SKIP] exhaustive policy search") !=
        std::string::npos);
  CHECK(skipped.output.find("[FAIL]") == std::string::npos);
}

TEST_CASE("help is available and exits cleanly") {
  const RunResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("sweep") != std::string::npos);
  CHECK(r.output.find("oracle") != std::string::npos);
}
