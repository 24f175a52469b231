#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fockdec/geometry.hpp"
#include "fockdec/operators.hpp"

namespace fockdec::cli {

struct InitSpec {
  enum class Type { Random, Explicit };
  Type type = Type::Random;
  double scale = 0.05;
  std::vector<Eigen::VectorXcd> exponents;  // explicit: one per subsystem 1..m-1
};

struct PsiSpec {
  enum class Type { Compose, Amplitudes, Eigenstate };
  Type type = Type::Compose;
  Eigen::VectorXcd amplitudes;
  int eigenstate_index = 0;
};

struct PairSpec {
  enum class Type { Phase, Perturb, Files };
  Type type = Type::Phase;
  double phi = 0.5;
  double scale = 1e-3;
  std::string file_a, file_b;
};

struct ObservableSpec {
  enum class Type { SiteOccupation, ModeOccupation, TotalNumber };
  Type type = Type::SiteOccupation;
  int index = 0;  // site or mode
};

struct RunConfig {
  HubbardParams model;
  int subsystem_count = 2;
  std::vector<int> order;  // 0-based product order; subsystem 0 is solved
  InitSpec init;
  PsiSpec psi;
  StepMode mode = StepMode::TimeDependent;
  double dt = 1e-2;
  double total_time = 1.0;
  double eta_guard = 1e-2;
  std::uint64_t seed = 1;
  int levels = 3;                              // converge
  int permtest_steps = 0;                      // 0: derive from total_time
  std::vector<std::vector<int>> permutations;  // permtest, 0-based
  PairSpec pair;                               // orbit-distance
  std::vector<ObservableSpec> observables;     // empty: site occupations

  nlohmann::json echo;  // the parsed file, reproduced in every summary
};

/// Reads and validates a JSON run configuration. Throws fockdec::Error with a
/// human-readable message on any problem.
RunConfig parse_config(const std::string& path);

std::string mode_name(StepMode mode);

}  // namespace fockdec::cli
