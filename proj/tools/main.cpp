#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "fockdec/errors.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int levels = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Path to the JSON run configuration")
      ->required();
  cmd->add_option("--out", args.out_dir, "Output directory (created if missing)");
  cmd->add_option("--seed", args.seed, "Override the configuration seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

int dispatch(const std::string& name, const CommonArgs& args) {
  using namespace fockdec::cli;
  RunConfig cfg = parse_config(args.config_path);
  if (args.seed_set) {
    cfg.seed = args.seed;
    cfg.echo["seed"] = args.seed;
  }
  if (args.levels > 0) {
    cfg.levels = args.levels;
    cfg.echo["levels"] = args.levels;
  }
  if (name == "run") return cmd_run(cfg, args.out_dir);
  if (name == "converge") return cmd_converge(cfg, args.out_dir);
  if (name == "permtest") return cmd_permtest(cfg, args.out_dir);
  return cmd_orbit_distance(cfg, args.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic subsystem-decomposition dynamics on small fermion lattices"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* run = app.add_subcommand("run", "Integrate one trajectory, emit CSV and JSON");
  add_common(run, args);
  CLI::App* converge =
      app.add_subcommand("converge", "Step-halving convergence and reversibility study");
  add_common(converge, args);
  converge->add_option("--levels", args.levels, "Number of step-halving levels (>= 3)");
  CLI::App* permtest =
      app.add_subcommand("permtest", "Beable divergence across subsystem permutations");
  add_common(permtest, args);
  CLI::App* orbit = app.add_subcommand("orbit-distance",
                                       "Distance between the phase orbits of two decompositions");
  add_common(orbit, args);

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return dispatch(name, args);
  } catch (const fockdec::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    // Configuration problems exit 1; numerical failures inside a command that
    // cannot produce partial output also land here.
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
