// End-to-end checks of the command-line tool: exit codes, determinism,
// output schemas. Drives the built binary through std::system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWorkDir = fs::temp_directory_path() / "fockdec_cli_test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FOCKDEC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const fs::path& path) { return json::parse(slurp(path)); }

const char* kInteracting = R"({
  "model": {"sites": 4, "spinful": false, "t": 1.0, "u": 0.0, "v": 2.0, "boundary": "open"},
  "subsystems": {"count": 3, "init": {"type": "random", "scale": 0.15}},
  "mode": "time-dependent",
  "dt": 0.01,
  "time": 0.5,
  "seed": 11
})";

struct Setup {
  Setup() {
    fs::remove_all(kWorkDir);
    fs::create_directories(kWorkDir);
    write_file(kWorkDir / "interacting.json", kInteracting);
  }
};
const Setup setup;

}  // namespace

TEST_CASE("run: free model reports chi = 1 at every step") {
  write_file(kWorkDir / "free.json", R"({
    "model": {"sites": 4, "spinful": false, "t": 1.0, "u": 0.0, "v": 0.0},
    "subsystems": {"count": 3, "init": {"type": "random", "scale": 0.15}},
    "mode": "time-dependent", "dt": 0.01, "time": 0.2, "seed": 5
  })");
  const fs::path out = kWorkDir / "free_out";
  CHECK(run_cli("run --config " + (kWorkDir / "free.json").string() + " --out " + out.string()) == 0);

  const json summary = load_json(out / "summary.json");
  CHECK(summary.at("status") == "ok");
  CHECK(std::abs(summary.at("chi").at("min").get<double>() - 1.0) < 1e-8);
  CHECK(std::abs(summary.at("chi").at("max").get<double>() - 1.0) < 1e-8);
  CHECK(summary.at("max_compose_residual").get<double>() < 1e-8);
  // The summary echoes the configuration for provenance.
  CHECK(summary.at("config").at("seed") == 5);

  // Trajectory CSV is rectangular with the advertised header.
  std::ifstream csv(out / "trajectory.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("step,time,chi,sigma,eta,c,delta_a,dt,condition,compose_residual", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 21);  // 20 steps + final state
}

TEST_CASE("run: identical seeds give byte-identical outputs, new seeds differ") {
  const std::string config = (kWorkDir / "interacting.json").string();
  CHECK(run_cli("run --config " + config + " --out " + (kWorkDir / "a").string()) == 0);
  CHECK(run_cli("run --config " + config + " --out " + (kWorkDir / "b").string()) == 0);
  CHECK(slurp(kWorkDir / "a" / "trajectory.csv") == slurp(kWorkDir / "b" / "trajectory.csv"));
  CHECK(slurp(kWorkDir / "a" / "summary.json") == slurp(kWorkDir / "b" / "summary.json"));

  CHECK(run_cli("run --config " + config + " --seed 99 --out " + (kWorkDir / "c").string()) == 0);
  CHECK(slurp(kWorkDir / "a" / "trajectory.csv") != slurp(kWorkDir / "c" / "trajectory.csv"));
  CHECK(load_json(kWorkDir / "c" / "summary.json").at("config").at("seed") == 99);
}

TEST_CASE("run: an oversized step aborts with exit 2 and partial output") {
  write_file(kWorkDir / "big.json", R"({
    "model": {"sites": 4, "spinful": false, "t": 1.0, "v": 2.0},
    "subsystems": {"count": 3, "init": {"type": "random", "scale": 0.15}},
    "dt": 5.0, "time": 20.0, "seed": 7
  })");
  const fs::path out = kWorkDir / "big_out";
  CHECK(run_cli("run --config " + (kWorkDir / "big.json").string() + " --out " + out.string()) == 2);
  const json summary = load_json(out / "summary.json");
  CHECK(summary.at("status") == "aborted");
  CHECK(summary.at("abort_reason").get<std::string>().find("StepTooLarge") !=
        std::string::npos);
  CHECK(fs::exists(out / "trajectory.csv"));
}

TEST_CASE("run: configuration problems exit 1") {
  CHECK(run_cli("run --config " + (kWorkDir / "missing.json").string() + " --out " +
                (kWorkDir / "x").string()) == 1);
  write_file(kWorkDir / "broken.json", "{\"model\": }");
  CHECK(run_cli("run --config " + (kWorkDir / "broken.json").string() + " --out " +
                (kWorkDir / "x").string()) == 1);
  write_file(kWorkDir / "badmode.json", R"({
    "model": {"sites": 2, "t": 1.0},
    "subsystems": {"count": 2, "init": {"type": "random"}},
    "mode": "nonsense", "dt": 0.01, "time": 0.1
  })");
  CHECK(run_cli("run --config " + (kWorkDir / "badmode.json").string() + " --out " +
                (kWorkDir / "x").string()) == 1);
}

TEST_CASE("converge: quadratic order and shrinking reversal errors") {
  const fs::path out = kWorkDir / "conv";
  CHECK(run_cli("converge --config " + (kWorkDir / "interacting.json").string() + " --out " +
                out.string() + " --levels 3") == 0);
  const json summary = load_json(out / "summary.json");
  const double order = summary.at("order").get<double>();
  CHECK(order > 1.7);
  CHECK(order < 2.3);
  CHECK(summary.at("order_in_range") == true);
  for (const auto& ratio : summary.at("reversal_ratios")) {
    CHECK(ratio.get<double>() > 3.5);
  }
  CHECK(fs::exists(out / "convergence.csv"));
}

TEST_CASE("converge: the free model sits at the floor and skips the order test") {
  write_file(kWorkDir / "freeconv.json", R"({
    "model": {"sites": 4, "spinful": false, "t": 1.0, "v": 0.0},
    "subsystems": {"count": 3, "init": {"type": "random", "scale": 0.15}},
    "dt": 1e-6, "time": 2e-5, "seed": 5
  })");
  const fs::path out = kWorkDir / "freeconv_out";
  CHECK(run_cli("converge --config " + (kWorkDir / "freeconv.json").string() + " --out " +
                out.string()) == 0);
  const json summary = load_json(out / "summary.json");
  CHECK(summary.at("order_in_range") == "skipped");
}

TEST_CASE("permtest: zero rows at the start, generic divergence, even control") {
  const fs::path out = kWorkDir / "perm";
  CHECK(run_cli("permtest --config " + (kWorkDir / "interacting.json").string() + " --out " +
                out.string()) == 0);
  const json summary = load_json(out / "summary.json");
  for (const auto& row : summary.at("rows")) {
    CHECK(row.at("t0_divergence").get<double>() < 1e-12);
    if (row.at("case") == "generic") {
      CHECK(row.at("one_step_divergence").get<double>() > 1e-10);
    } else {
      CHECK(row.at("case") == "all_even");
      CHECK(row.at("one_step_divergence").get<double>() < 1e-12);
      CHECK(row.at("multi_step_divergence").get<double>() < 1e-12);
    }
  }
}

TEST_CASE("orbit-distance: a pure phase pair lies on one orbit") {
  write_file(kWorkDir / "orbit.json", R"({
    "model": {"sites": 4, "spinful": false, "t": 1.0, "v": 2.0},
    "subsystems": {"count": 3, "init": {"type": "random", "scale": 0.15}},
    "mode": "phase-orbit", "dt": 0.01, "time": 0.1, "seed": 3,
    "pair": {"type": "phase", "phi": 0.9}
  })");
  const fs::path out = kWorkDir / "orb";
  CHECK(run_cli("orbit-distance --config " + (kWorkDir / "orbit.json").string() + " --out " +
                out.string()) == 0);
  const json summary = load_json(out / "summary.json");
  CHECK(std::abs(summary.at("orbit_distance_sq").get<double>()) < 1e-10);
  CHECK(summary.at("plain_distance_sq").get<double>() > 0.1);
  const double phi_star = summary.at("phi_star").get<double>();
  CHECK(std::abs(phi_star - (2.0 * 3.14159265358979324 - 0.9)) < 1e-6);
  CHECK(fs::exists(out / "orbit.csv"));
}

TEST_CASE("orbit-distance: perturbed pairs match the small-change form") {
  write_file(kWorkDir / "orbit2.json", R"({
    "model": {"sites": 4, "spinful": false, "t": 1.0, "v": 2.0},
    "subsystems": {"count": 3, "init": {"type": "random", "scale": 0.15}},
    "dt": 0.01, "time": 0.1, "seed": 3,
    "pair": {"type": "perturb", "scale": 0.001}
  })");
  const fs::path out = kWorkDir / "orb2";
  CHECK(run_cli("orbit-distance --config " + (kWorkDir / "orbit2.json").string() + " --out " +
                out.string()) == 0);
  const json summary = load_json(out / "summary.json");
  const double finite = summary.at("orbit_distance_sq").get<double>();
  const double small = summary.at("small_change_orbit_distance_sq").get<double>();
  CHECK(finite <= summary.at("plain_distance_sq").get<double>() + 1e-12);
  CHECK(std::abs(finite - small) < 1e-7 * (1.0 + std::abs(small)));
}

TEST_CASE("orbit-distance: decomposition files from two runs") {
  const std::string config = (kWorkDir / "interacting.json").string();
  CHECK(run_cli("run --config " + config + " --out " + (kWorkDir / "fa").string()) == 0);
  CHECK(run_cli("run --config " + config + " --seed 12 --out " + (kWorkDir / "fb").string()) == 0);
  write_file(kWorkDir / "pairfiles.json", std::string(R"({
    "model": {"sites": 4, "spinful": false, "t": 1.0, "v": 2.0},
    "subsystems": {"count": 3, "init": {"type": "random", "scale": 0.15}},
    "dt": 0.01, "time": 0.1, "seed": 3,
    "pair": {"type": "files",
             "a": ")") + (kWorkDir / "fa" / "final_decomposition.json").string() +
    R"(", "b": ")" + (kWorkDir / "fb" / "final_decomposition.json").string() + R"("}
  })");
  const fs::path out = kWorkDir / "orb3";
  CHECK(run_cli("orbit-distance --config " + (kWorkDir / "pairfiles.json").string() + " --out " +
                out.string()) == 0);
  const json summary = load_json(out / "summary.json");
  CHECK(summary.at("orbit_distance_sq").get<double>() <=
        summary.at("plain_distance_sq").get<double>() + 1e-12);
}

TEST_CASE("run: explicit amplitudes and eigenstate initial states") {
  write_file(kWorkDir / "eigen.json", R"({
    "model": {"sites": 2, "spinful": false, "t": 1.0, "v": 0.5},
    "subsystems": {"count": 2, "init": {"type": "random", "scale": 0.1},
                   "psi": {"type": "eigenstate", "index": 1}},
    "mode": "time-dependent", "dt": 0.01, "time": 0.1, "seed": 2
  })");
  const fs::path out = kWorkDir / "eig_out";
  CHECK(run_cli("run --config " + (kWorkDir / "eigen.json").string() + " --out " + out.string()) == 0);
  CHECK(load_json(out / "summary.json").at("max_compose_residual").get<double>() < 1e-9);

  write_file(kWorkDir / "explicit.json", R"({
    "model": {"sites": 2, "spinful": false, "t": 1.0, "v": 0.5},
    "subsystems": {"count": 2,
                   "init": {"type": "explicit",
                            "exponents": [{"re": [0, 0.1, -0.05, 0.2], "im": [0, 0.02, 0, -0.1]}]},
                   "psi": {"type": "amplitudes",
                           "re": [1.0, 0.2, 0.1, 0.05], "im": [0.0, -0.1, 0.02, 0.0]}},
    "mode": "plain", "dt": 0.005, "time": 0.05, "seed": 2
  })");
  const fs::path out2 = kWorkDir / "expl_out";
  CHECK(run_cli("run --config " + (kWorkDir / "explicit.json").string() + " --out " +
                out2.string()) == 0);
  const json summary = load_json(out2 / "summary.json");
  CHECK(summary.at("status") == "ok");
  CHECK(summary.at("max_compose_residual").get<double>() < 1e-10);
}
