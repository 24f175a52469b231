#include "config.hpp"

#include <fstream>

#include "fockdec/errors.hpp"

namespace fockdec::cli {

namespace {

using nlohmann::json;

Eigen::VectorXcd parse_complex_vector(const json& node, int expected_size, const char* what) {
  if (!node.contains("re") || !node.contains("im")) {
    throw Error(std::string(what) + ": need \"re\" and \"im\" arrays");
  }
  const auto re = node.at("re").get<std::vector<double>>();
  const auto im = node.at("im").get<std::vector<double>>();
  if (static_cast<int>(re.size()) != expected_size ||
      static_cast<int>(im.size()) != expected_size) {
    throw Error(std::string(what) + ": expected " + std::to_string(expected_size) +
                " amplitudes");
  }
  Eigen::VectorXcd out(expected_size);
  for (int i = 0; i < expected_size; ++i) out[i] = Complex(re[i], im[i]);
  return out;
}

std::vector<int> parse_order(const json& node, int m, const char* what) {
  const auto labels = node.get<std::vector<int>>();
  if (static_cast<int>(labels.size()) != m) {
    throw Error(std::string(what) + ": permutation must list all " + std::to_string(m) +
                " subsystems");
  }
  std::vector<int> order(m);
  std::vector<bool> seen(m, false);
  for (int p = 0; p < m; ++p) {
    const int label = labels[p];
    if (label < 1 || label > m || seen[label - 1]) {
      throw Error(std::string(what) + ": not a permutation of 1.." + std::to_string(m));
    }
    seen[label - 1] = true;
    order[p] = label - 1;
  }
  return order;
}

StepMode parse_mode(const std::string& name) {
  if (name == "plain") return StepMode::Plain;
  if (name == "time-dependent") return StepMode::TimeDependent;
  if (name == "phase-orbit") return StepMode::PhaseOrbit;
  if (name == "unconstrained") return StepMode::Unconstrained;
  throw Error("config: unknown mode \"" + name +
              "\" (expected plain | time-dependent | phase-orbit | unconstrained)");
}

}  // namespace

std::string mode_name(StepMode mode) {
  switch (mode) {
    case StepMode::Plain: return "plain";
    case StepMode::TimeDependent: return "time-dependent";
    case StepMode::PhaseOrbit: return "phase-orbit";
    case StepMode::Unconstrained: return "unconstrained";
  }
  return "unknown";
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(std::string("config: JSON parse failure: ") + e.what());
  }

  RunConfig cfg;
  cfg.echo = root;
  try {
    const json& model = root.at("model");
    cfg.model.sites = model.at("sites").get<int>();
    cfg.model.spinful = model.value("spinful", false);
    cfg.model.t = model.value("t", 1.0);
    cfg.model.u = model.value("u", 0.0);
    cfg.model.v = model.value("v", 0.0);
    const std::string boundary = model.value("boundary", "open");
    if (boundary == "open") {
      cfg.model.boundary = Boundary::Open;
    } else if (boundary == "periodic") {
      cfg.model.boundary = Boundary::Periodic;
    } else {
      throw Error("config: boundary must be open or periodic");
    }

    const int dim = 1 << cfg.model.mode_count();
    const json& subsystems = root.at("subsystems");
    cfg.subsystem_count = subsystems.at("count").get<int>();
    if (cfg.subsystem_count < 2) throw Error("config: need at least two subsystems");

    if (subsystems.contains("permutation")) {
      cfg.order = parse_order(subsystems.at("permutation"), cfg.subsystem_count,
                              "config permutation");
    } else {
      cfg.order.resize(cfg.subsystem_count);
      for (int k = 0; k < cfg.subsystem_count; ++k) cfg.order[k] = k;
    }

    const json& init = subsystems.at("init");
    const std::string init_type = init.at("type").get<std::string>();
    if (init_type == "random") {
      cfg.init.type = InitSpec::Type::Random;
      cfg.init.scale = init.value("scale", 0.05);
    } else if (init_type == "explicit") {
      cfg.init.type = InitSpec::Type::Explicit;
      const json& exps = init.at("exponents");
      if (static_cast<int>(exps.size()) != cfg.subsystem_count - 1) {
        throw Error("config: explicit init needs one exponent table per variable subsystem");
      }
      for (const auto& e : exps) {
        cfg.init.exponents.push_back(parse_complex_vector(e, dim, "config exponent"));
      }
    } else {
      throw Error("config: init type must be random or explicit");
    }

    if (subsystems.contains("psi")) {
      const json& psi = subsystems.at("psi");
      const std::string psi_type = psi.at("type").get<std::string>();
      if (psi_type == "compose") {
        cfg.psi.type = PsiSpec::Type::Compose;
      } else if (psi_type == "amplitudes") {
        cfg.psi.type = PsiSpec::Type::Amplitudes;
        cfg.psi.amplitudes = parse_complex_vector(psi, dim, "config psi");
      } else if (psi_type == "eigenstate") {
        cfg.psi.type = PsiSpec::Type::Eigenstate;
        cfg.psi.eigenstate_index = psi.at("index").get<int>();
        if (cfg.psi.eigenstate_index < 0 || cfg.psi.eigenstate_index >= dim) {
          throw Error("config: eigenstate index out of range");
        }
      } else {
        throw Error("config: psi type must be compose, amplitudes, or eigenstate");
      }
    }

    cfg.mode = parse_mode(root.value("mode", std::string("time-dependent")));
    cfg.dt = root.at("dt").get<double>();
    cfg.total_time = root.at("time").get<double>();
    cfg.eta_guard = root.value("eta_guard", 1e-2);
    cfg.seed = root.value("seed", std::uint64_t{1});
    cfg.levels = root.value("levels", 3);
    cfg.permtest_steps = root.value("permtest_steps", 0);

    if (root.contains("permutations")) {
      for (const auto& p : root.at("permutations")) {
        cfg.permutations.push_back(parse_order(p, cfg.subsystem_count, "config permutations"));
      }
    }

    if (root.contains("observables")) {
      const json& obs = root.at("observables");
      if (obs.is_string()) {
        if (obs.get<std::string>() != "site-occupations") {
          throw Error("config: unknown observable set \"" + obs.get<std::string>() + "\"");
        }
        // the default set; leave the list empty
      } else {
        for (const auto& o : obs) {
          ObservableSpec one;
          const std::string type = o.at("type").get<std::string>();
          if (type == "site-occupation") {
            one.type = ObservableSpec::Type::SiteOccupation;
            one.index = o.at("site").get<int>();
            if (one.index < 0 || one.index >= cfg.model.sites) {
              throw Error("config: observable site out of range");
            }
          } else if (type == "mode-occupation") {
            one.type = ObservableSpec::Type::ModeOccupation;
            one.index = o.at("mode").get<int>();
            if (one.index < 0 || one.index >= cfg.model.mode_count()) {
              throw Error("config: observable mode out of range");
            }
          } else if (type == "total-number") {
            one.type = ObservableSpec::Type::TotalNumber;
          } else {
            throw Error("config: unknown observable type \"" + type + "\"");
          }
          cfg.observables.push_back(one);
        }
        if (cfg.observables.empty()) {
          throw Error("config: observables list must not be empty");
        }
      }
    }

    if (root.contains("pair")) {
      const json& pair = root.at("pair");
      const std::string pair_type = pair.at("type").get<std::string>();
      if (pair_type == "phase") {
        cfg.pair.type = PairSpec::Type::Phase;
        cfg.pair.phi = pair.value("phi", 0.5);
      } else if (pair_type == "perturb") {
        cfg.pair.type = PairSpec::Type::Perturb;
        cfg.pair.scale = pair.value("scale", 1e-3);
      } else if (pair_type == "files") {
        cfg.pair.type = PairSpec::Type::Files;
        cfg.pair.file_a = pair.at("a").get<std::string>();
        cfg.pair.file_b = pair.at("b").get<std::string>();
      } else {
        throw Error("config: pair type must be phase, perturb, or files");
      }
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }

  if (cfg.dt == 0.0) throw Error("config: dt must be nonzero");
  if (cfg.total_time < 0.0) throw Error("config: time must be nonnegative");
  return cfg;
}

}  // namespace fockdec::cli
