#include "experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <vector>

#include "fockdec/decomposition.hpp"
#include "fockdec/dynamics.hpp"
#include "fockdec/random.hpp"

namespace fockdec::cli {

namespace {

using nlohmann::json;

// Squared distances are differences of overlaps near one, so they cannot be
// resolved below roughly the machine epsilon.
constexpr double kSquaredDistanceFloor = 1e-14;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json complex_vector_json(const Eigen::VectorXcd& v) {
  std::vector<double> re(v.size()), im(v.size());
  for (int i = 0; i < v.size(); ++i) {
    re[i] = v[i].real();
    im[i] = v[i].imag();
  }
  return json{{"re", re}, {"im", im}};
}

Eigen::VectorXcd complex_vector_from_json(const json& node, int size, const char* what) {
  const auto re = node.at("re").get<std::vector<double>>();
  const auto im = node.at("im").get<std::vector<double>>();
  if (static_cast<int>(re.size()) != size || static_cast<int>(im.size()) != size) {
    throw Error(std::string(what) + ": wrong amplitude count");
  }
  Eigen::VectorXcd out(size);
  for (int i = 0; i < size; ++i) out[i] = Complex(re[i], im[i]);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  // Write to a temp name first so partially written files never shadow
  // complete ones.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

struct Experiment {
  ManyBodyOperator h;
  Decomposition dec;
  FockVector psi;
  std::vector<ManyBodyOperator> observables;
  std::vector<std::string> observable_names;
};

ManyBodyOperator site_occupation(const HubbardParams& model, ModeSpace modes, int site) {
  if (model.spinful) {
    return number_op(modes, 2 * site) + number_op(modes, 2 * site + 1);
  }
  return number_op(modes, site);
}

std::vector<ManyBodyOperator> chosen_observables(const RunConfig& cfg,
                                                 std::vector<std::string>& names) {
  const ModeSpace modes(cfg.model.mode_count());
  std::vector<ManyBodyOperator> obs;
  if (cfg.observables.empty()) {
    // Default: occupation of every site.
    for (int s = 0; s < cfg.model.sites; ++s) {
      obs.push_back(site_occupation(cfg.model, modes, s));
      names.push_back("n" + std::to_string(s));
    }
    return obs;
  }
  for (const ObservableSpec& spec : cfg.observables) {
    switch (spec.type) {
      case ObservableSpec::Type::SiteOccupation:
        obs.push_back(site_occupation(cfg.model, modes, spec.index));
        names.push_back("n" + std::to_string(spec.index));
        break;
      case ObservableSpec::Type::ModeOccupation:
        obs.push_back(number_op(modes, spec.index));
        names.push_back("m" + std::to_string(spec.index));
        break;
      case ObservableSpec::Type::TotalNumber:
        obs.push_back(total_number(modes));
        names.push_back("ntot");
        break;
    }
  }
  return obs;
}

Eigen::VectorXcd random_exponent(const ModeSpace& modes, double scale, RandomSource& rng) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(modes.dim());
  for (int mask = 1; mask < modes.dim(); ++mask) x[mask] = scale * rng.complex_gaussian();
  return x;
}

Experiment build_experiment(const RunConfig& cfg) {
  ManyBodyOperator h = build_hubbard(cfg.model);
  const ModeSpace modes = h.modes();

  Decomposition dec(modes, cfg.subsystem_count);
  dec.set_order(cfg.order);

  RandomSource rng(cfg.seed);
  for (int k = 1; k < cfg.subsystem_count; ++k) {
    if (cfg.init.type == InitSpec::Type::Random) {
      dec.set_exponent(k, FockVector(modes, random_exponent(modes, cfg.init.scale, rng)));
    } else {
      dec.set_exponent(k, FockVector(modes, cfg.init.exponents[k - 1]));
    }
  }

  FockVector psi(modes);
  switch (cfg.psi.type) {
    case PsiSpec::Type::Compose:
      dec.set_v(FockVector::vacuum_unit(modes));
      psi = dec.compose();
      break;
    case PsiSpec::Type::Amplitudes:
      psi = FockVector(modes, cfg.psi.amplitudes);
      dec.set_v(solve_v(psi, dec));
      break;
    case PsiSpec::Type::Eigenstate: {
      const SpectralCache cache = SpectralCache::build(h);
      psi = FockVector(modes, cache.eigenvectors.col(cfg.psi.eigenstate_index));
      dec.set_v(solve_v(psi, dec));
      break;
    }
  }

  Experiment exp{std::move(h), std::move(dec), std::move(psi), {}, {}};
  exp.observables = chosen_observables(cfg, exp.observable_names);
  return exp;
}

IntegrateOptions integrate_options(const RunConfig& cfg, const Experiment& exp) {
  IntegrateOptions opts;
  opts.mode = cfg.mode;
  opts.dt = cfg.dt;
  opts.total_time = cfg.total_time;
  opts.step.eta_guard = cfg.eta_guard;
  opts.observables = exp.observables;
  return opts;
}

std::string trajectory_csv(const Trajectory& traj, const Experiment& exp) {
  std::string out = "step,time,chi,sigma,eta,c,delta_a,dt,condition,compose_residual";
  const int m = traj.points.front().dec.subsystem_count();
  for (int k = 0; k < m; ++k) out += ",norm_k" + std::to_string(k);
  for (int k = 0; k < m; ++k) {
    for (const auto& name : exp.observable_names) {
      out += "," + name + "_k" + std::to_string(k);
    }
  }
  out += "\n";

  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const TrajectoryPoint& p = traj.points[i];
    out += std::to_string(i) + "," + fmt17(p.t);
    if (p.step) {
      out += "," + fmt17(p.step->chi) + "," + fmt17(p.step->sigma) + "," + fmt17(p.step->eta) +
             "," + fmt17(p.step->c) + "," + fmt17(p.step->delta_a) + "," + fmt17(p.step->dt) +
             "," + fmt17(p.step->condition);
    } else {
      out += ",nan,nan,nan,nan,nan,nan,nan";
    }
    out += "," + fmt17(p.compose_residual);
    for (double n : p.subsystem_norms) out += "," + fmt17(n);
    for (int k = 0; k < p.beables.rows(); ++k) {
      for (int a = 0; a < p.beables.cols(); ++a) out += "," + fmt17(p.beables(k, a));
    }
    out += "\n";
  }
  return out;
}

json trajectory_summary(const RunConfig& cfg, const Trajectory& traj) {
  json summary;
  summary["config"] = cfg.echo;
  summary["mode"] = mode_name(traj.mode);
  summary["status"] = traj.aborted() ? "aborted" : "ok";
  if (traj.aborted()) summary["abort_reason"] = traj.abort_reason;

  int steps = 0;
  double chi_min = 0.0, chi_max = 0.0, chi_final = 0.0;
  double max_residual = 0.0;
  bool first = true;
  for (const auto& p : traj.points) {
    max_residual = std::max(max_residual, p.compose_residual);
    if (!p.step) continue;
    ++steps;
    chi_final = p.step->chi;
    if (first) {
      chi_min = chi_max = p.step->chi;
      first = false;
    } else {
      chi_min = std::min(chi_min, p.step->chi);
      chi_max = std::max(chi_max, p.step->chi);
    }
  }
  summary["steps"] = steps;
  summary["chi"] = json{{"final", chi_final}, {"min", chi_min}, {"max", chi_max}};
  summary["max_compose_residual"] = max_residual;
  return summary;
}

json decomposition_json(const Decomposition& dec, const FockVector& psi) {
  json j;
  j["modes"] = dec.modes().modes();
  j["subsystems"] = dec.subsystem_count();
  std::vector<int> labels(dec.subsystem_count());
  for (int p = 0; p < dec.subsystem_count(); ++p) labels[p] = dec.order()[p] + 1;
  j["permutation"] = labels;
  json exps = json::array();
  for (int k = 1; k < dec.subsystem_count(); ++k) {
    exps.push_back(complex_vector_json(dec.exponent(k).amplitudes()));
  }
  j["exponents"] = exps;
  j["v"] = complex_vector_json(dec.v().amplitudes());
  j["psi"] = complex_vector_json(psi.amplitudes());
  return j;
}

std::pair<Decomposition, FockVector> decomposition_from_json(const json& j) {
  const ModeSpace modes(j.at("modes").get<int>());
  const int m = j.at("subsystems").get<int>();
  Decomposition dec(modes, m);
  if (j.contains("permutation")) {
    std::vector<int> order;
    for (int label : j.at("permutation").get<std::vector<int>>()) order.push_back(label - 1);
    dec.set_order(order);
  }
  const json& exps = j.at("exponents");
  if (static_cast<int>(exps.size()) != m - 1) {
    throw Error("decomposition file: wrong exponent count");
  }
  for (int k = 1; k < m; ++k) {
    dec.set_exponent(
        k, FockVector(modes, complex_vector_from_json(exps[k - 1], modes.dim(), "exponent")));
  }
  dec.set_v(FockVector(modes, complex_vector_from_json(j.at("v"), modes.dim(), "v")));
  FockVector psi(modes, complex_vector_from_json(j.at("psi"), modes.dim(), "psi"));
  return {std::move(dec), std::move(psi)};
}

}  // namespace

int cmd_run(const RunConfig& cfg, const std::string& out_dir) {
  const Experiment exp = build_experiment(cfg);
  const Trajectory traj = integrate(exp.dec, exp.h, integrate_options(cfg, exp), &exp.psi);

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / "trajectory.csv", trajectory_csv(traj, exp));
  write_json(dir / "summary.json", trajectory_summary(cfg, traj));
  write_json(dir / "final_decomposition.json",
             decomposition_json(traj.back().dec, traj.back().psi));
  return traj.aborted() ? 2 : 0;
}

int cmd_converge(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.levels < 3) throw Error("converge: need at least three levels");
  const Experiment exp = build_experiment(cfg);

  std::vector<double> dts;
  std::vector<Trajectory> runs;
  std::vector<double> reversal;
  for (int level = 0; level < cfg.levels; ++level) {
    IntegrateOptions opts = integrate_options(cfg, exp);
    opts.dt = cfg.dt / static_cast<double>(1 << level);
    dts.push_back(opts.dt);
    Trajectory traj = integrate(exp.dec, exp.h, opts, &exp.psi);
    if (traj.aborted()) {
      json summary = trajectory_summary(cfg, traj);
      summary["level"] = level;
      std::filesystem::create_directories(out_dir);
      write_json(std::filesystem::path(out_dir) / "summary.json", summary);
      return 2;
    }
    const ReversibilityReport rev = reversibility_test(exp.dec, exp.h, opts, &exp.psi);
    reversal.push_back(rev.return_distance_sq);
    runs.push_back(std::move(traj));
  }

  // Squared distances throughout, like every other distance in this code;
  // the solutions converge quadratically in that measure.
  std::vector<double> gaps;
  for (int level = 0; level + 1 < cfg.levels; ++level) {
    gaps.push_back(hs_distance_sq(runs[level].back().dec, runs[level + 1].back().dec));
  }
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    orders.push_back(gaps[i] > 0.0 && gaps[i + 1] > 0.0
                         ? std::log2(gaps[i] / gaps[i + 1])
                         : std::numeric_limits<double>::quiet_NaN());
  }

  std::string csv = "level,dt,endpoint_gap,order,reversal_error\n";
  for (int level = 0; level < cfg.levels; ++level) {
    csv += std::to_string(level) + "," + fmt17(dts[level]);
    csv += "," + (level < static_cast<int>(gaps.size()) ? fmt17(gaps[level]) : "nan");
    csv += "," + (level >= 2 && level - 2 < static_cast<int>(orders.size())
                      ? fmt17(orders[level - 2])
                      : "nan");
    csv += "," + fmt17(reversal[level]) + "\n";
  }

  const bool at_floor = gaps.empty() || std::abs(gaps.back()) < kSquaredDistanceFloor;
  json summary;
  summary["config"] = cfg.echo;
  summary["levels"] = cfg.levels;
  summary["endpoint_gaps"] = gaps;
  summary["reversal_errors"] = reversal;
  if (at_floor) {
    summary["order"] = nullptr;
    summary["order_in_range"] = "skipped";
    summary["order_note"] = "endpoint differences at the roundoff floor";
  } else {
    const double p = orders.back();
    summary["order"] = p;
    summary["order_in_range"] = (p >= 1.7 && p <= 2.3);
  }
  std::vector<double> reversal_ratios;
  for (std::size_t i = 0; i + 1 < reversal.size(); ++i) {
    reversal_ratios.push_back(reversal[i + 1] > 0.0 ? reversal[i] / reversal[i + 1]
                                                    : std::numeric_limits<double>::quiet_NaN());
  }
  summary["reversal_ratios"] = reversal_ratios;

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / "convergence.csv", csv);
  write_json(dir / "summary.json", summary);
  return 0;
}

int cmd_permtest(const RunConfig& cfg, const std::string& out_dir) {
  const Experiment exp = build_experiment(cfg);
  const int m = cfg.subsystem_count;

  std::vector<std::vector<int>> perms = cfg.permutations;
  if (perms.empty()) {
    std::vector<int> identity(m);
    for (int k = 0; k < m; ++k) identity[k] = k;
    perms.push_back(identity);
    std::vector<int> swapped = identity;
    std::swap(swapped[m - 2], swapped[m - 1]);
    perms.push_back(swapped);
  }

  const long multi_steps = cfg.permtest_steps > 0
                               ? cfg.permtest_steps
                               : std::lround(cfg.total_time / std::abs(cfg.dt));

  // The generic case plus an all-even control with the odd exponent
  // amplitudes removed.
  struct Case {
    std::string name;
    Decomposition dec;
  };
  std::vector<Case> cases;
  cases.push_back({"generic", exp.dec});
  Decomposition even_dec = exp.dec;
  for (int k = 1; k < m; ++k) even_dec.set_exponent(k, even_part(exp.dec.exponent(k)));
  even_dec.set_v(FockVector::vacuum_unit(exp.dec.modes()));
  cases.push_back({"all_even", std::move(even_dec)});

  std::string csv = "case,permutation,t0_divergence,one_step_divergence,multi_step_divergence\n";
  json summary;
  summary["config"] = cfg.echo;
  json rows = json::array();

  std::string abort_reason;

  for (const Case& c : cases) {
    // Reference tables from the first permutation.
    std::vector<Eigen::MatrixXd> ref;  // t0, one step, multi step
    for (std::size_t pi = 0; pi < perms.size() && abort_reason.empty(); ++pi) {
      Decomposition dec = c.dec;
      dec.set_order(perms[pi]);
      const FockVector psi = dec.compose();

      IntegrateOptions one = integrate_options(cfg, exp);
      one.total_time = std::abs(cfg.dt);
      Trajectory traj_one = integrate(dec, exp.h, one, &psi);
      if (traj_one.aborted()) {
        abort_reason = traj_one.abort_reason;
        break;
      }

      IntegrateOptions multi = integrate_options(cfg, exp);
      multi.total_time = multi_steps * std::abs(cfg.dt);
      Trajectory traj_multi = integrate(dec, exp.h, multi, &psi);
      if (traj_multi.aborted()) {
        abort_reason = traj_multi.abort_reason;
        break;
      }

      const std::vector<Eigen::MatrixXd> tables = {traj_one.points.front().beables,
                                                   traj_one.back().beables,
                                                   traj_multi.back().beables};
      if (pi == 0) {
        ref = tables;
        continue;
      }
      json row;
      row["case"] = c.name;
      std::vector<int> labels(m);
      for (int p = 0; p < m; ++p) labels[p] = perms[pi][p] + 1;
      row["permutation"] = labels;
      const double d0 = (tables[0] - ref[0]).cwiseAbs().maxCoeff();
      const double d1 = (tables[1] - ref[1]).cwiseAbs().maxCoeff();
      const double dn = (tables[2] - ref[2]).cwiseAbs().maxCoeff();
      row["t0_divergence"] = d0;
      row["one_step_divergence"] = d1;
      row["multi_step_divergence"] = dn;
      rows.push_back(row);

      std::string perm_str;
      for (int p = 0; p < m; ++p) perm_str += (p ? "-" : "") + std::to_string(labels[p]);
      csv += c.name + "," + perm_str + "," + fmt17(d0) + "," + fmt17(d1) + "," + fmt17(dn) + "\n";
    }
  }
  summary["rows"] = rows;
  summary["multi_steps"] = multi_steps;
  summary["status"] = abort_reason.empty() ? "ok" : "aborted";
  if (!abort_reason.empty()) summary["abort_reason"] = abort_reason;

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / "permtest.csv", csv);
  write_json(dir / "summary.json", summary);
  return abort_reason.empty() ? 0 : 2;
}

int cmd_orbit_distance(const RunConfig& cfg, const std::string& out_dir) {
  Decomposition dec_a = build_experiment(cfg).dec;
  Decomposition dec_b = dec_a;

  switch (cfg.pair.type) {
    case PairSpec::Type::Phase:
      dec_b = apply_phase(dec_a, cfg.pair.phi);
      break;
    case PairSpec::Type::Perturb: {
      RandomSource rng(cfg.seed + 1);
      for (int k = 1; k < dec_b.subsystem_count(); ++k) {
        Eigen::VectorXcd x = dec_b.exponent(k).amplitudes();
        for (int i = 1; i < x.size(); ++i) x[i] += cfg.pair.scale * rng.complex_gaussian();
        dec_b.set_exponent(k, FockVector(dec_b.modes(), std::move(x)));
      }
      break;
    }
    case PairSpec::Type::Files: {
      std::ifstream fa(cfg.pair.file_a), fb(cfg.pair.file_b);
      if (!fa || !fb) throw Error("orbit-distance: cannot open decomposition files");
      auto [a, psi_a] = decomposition_from_json(json::parse(fa));
      auto [b, psi_b] = decomposition_from_json(json::parse(fb));
      dec_a = std::move(a);
      dec_b = std::move(b);
      break;
    }
  }

  const double plain = hs_distance_sq(dec_a, dec_b);
  const OrbitDistance orbit = phase_orbit_distance_finite(dec_a, dec_b);

  constexpr int kSamples = 256;
  std::string csv = "phi,lambda\n";
  for (int j = 0; j < kSamples; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / kSamples;
    csv += fmt17(phi) + "," + fmt17(orbit.lambda(phi)) + "\n";
  }

  json summary;
  summary["config"] = cfg.echo;
  summary["plain_distance_sq"] = plain;
  summary["orbit_distance_sq"] = orbit.distance_sq;
  summary["phi_star"] = orbit.phi_star;
  if (cfg.pair.type == PairSpec::Type::Perturb) {
    const DirectSumVector delta = direct_sum_difference(dec_a, dec_b);
    summary["small_change_orbit_distance_sq"] = phase_orbit_distance_small(dec_a, delta);
  }

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / "orbit.csv", csv);
  write_json(dir / "summary.json", summary);
  return 0;
}

}  // namespace fockdec::cli
