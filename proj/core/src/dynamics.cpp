#include "fockdec/dynamics.hpp"

#include <cmath>
#include <limits>

#include "fockdec/random.hpp"

namespace fockdec {

namespace {

constexpr double kChiFloor = 1e-14;
constexpr double kChiSlack = 1e-9;

double condition_of(double rcond) {
  return rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

void check_chi_range(double chi) {
  if (!(chi >= -kChiSlack && chi <= 1.0 + kChiSlack)) {
    throw Error("stability functional out of range: chi = " + std::to_string(chi));
  }
  if (chi < kChiFloor) {
    throw DegenerateEnergyError("stability step: no evolving component, chi = 0");
  }
}

StabilityReport make_report(double chi, double delta_a, double dt, double condition,
                            const StepOptions& opts) {
  StabilityReport report;
  report.chi = chi;
  report.delta_a = delta_a;
  report.dt = dt;
  report.sigma = delta_a * dt;
  report.c = report.sigma / chi;
  report.eta = report.c * report.c * chi;
  report.condition = condition;
  if (report.eta > opts.eta_guard) {
    throw StepTooLargeError("stability step: step distance " + std::to_string(report.eta) +
                            " exceeds the quadratic-regime guard");
  }
  return report;
}

}  // namespace

RealBlockSystem real_block_system(const Eigen::MatrixXcd& mu, const Eigen::MatrixXcd& nu,
                                  const Eigen::VectorXcd& sigma) {
  const int n = static_cast<int>(mu.rows());
  const Eigen::MatrixXd mu_re = mu.real(), mu_im = mu.imag();
  const Eigen::MatrixXd nu_re = nu.real(), nu_im = nu.imag();

  RealBlockSystem system;
  system.eta.resize(2 * n, 2 * n);
  system.eta.topLeftCorner(n, n) = mu_re + nu_re;
  system.eta.topRightCorner(n, n) = -mu_im + nu_im;
  system.eta.bottomLeftCorner(n, n) = mu_im + nu_im;
  system.eta.bottomRightCorner(n, n) = mu_re - nu_re;
  system.eta = 0.5 * (system.eta + system.eta.transpose().eval());

  system.sigma.resize(2 * n);
  system.sigma.head(n) = sigma.imag();
  system.sigma.tail(n) = -sigma.real();
  return system;
}

double chi_of(const RealBlockSystem& system, const Eigen::VectorXd& x) {
  const double s = system.sigma.dot(x);
  const double e = x.dot(system.eta * x);
  if (e <= 0.0) return 0.0;
  return s * s / e;
}

StepResult step_time_independent(const Decomposition& dec, const ManyBodyOperator& h,
                                 double dt, const StepOptions& opts) {
  const TangentFrame frame = tangent_frame(dec);
  const QuadraticForms forms = build_quadratic_forms(dec, frame, h, StepMode::Plain);

  Eigen::LDLT<Eigen::MatrixXcd> solver(forms.eta_hat);
  if (solver.info() != Eigen::Success) {
    throw SingularSystemError("step: metric factorization failed");
  }
  const double condition = condition_of(solver.rcond());
  if (condition > opts.condition_limit) {
    throw SingularSystemError("step: metric condition estimate " + std::to_string(condition));
  }

  const Eigen::VectorXcd pulled = solver.solve(forms.sigma);
  const double chi = forms.sigma.dot(pulled).real();
  check_chi_range(chi);

  StepResult result;
  result.report = make_report(chi, forms.delta_a, dt, condition, opts);
  result.delta_x = Complex(0.0, -result.report.c) * pulled;
  return result;
}

StepResult step_time_dependent(const Decomposition& dec, const ManyBodyOperator& h,
                               const FockVector& psi, double dt, StepMode mode,
                               const StepOptions& opts) {
  if (mode == StepMode::Plain) return step_time_independent(dec, h, dt, opts);

  const TangentFrame frame = tangent_frame(dec);
  const QuadraticForms forms = build_quadratic_forms(dec, frame, h, mode, &psi);
  const auto [mu, nu] = assemble_mu_nu(forms);
  const RealBlockSystem system = real_block_system(mu, nu, forms.sigma);

  Eigen::LDLT<Eigen::MatrixXd> solver(system.eta);
  if (solver.info() != Eigen::Success) {
    throw SingularSystemError("step: metric factorization failed");
  }
  const double condition = condition_of(solver.rcond());
  if (condition > opts.condition_limit) {
    throw SingularSystemError("step: metric condition estimate " + std::to_string(condition));
  }

  const Eigen::VectorXd pulled = solver.solve(system.sigma);
  const double chi = system.sigma.dot(pulled);
  check_chi_range(chi);

  StepResult result;
  result.report = make_report(chi, forms.delta_a, dt, condition, opts);
  const int n = forms.size();
  const Eigen::VectorXd x = result.report.c * pulled;
  result.delta_x = x.head(n) + Complex(0.0, 1.0) * x.tail(n);
  return result;
}

void apply_exponent_step(Decomposition& dec, const Eigen::VectorXcd& delta_x) {
  const int nb = dec.modes().dim() - 1;
  if (delta_x.size() != (dec.subsystem_count() - 1) * nb) {
    throw Error("apply_exponent_step: coefficient vector has wrong size");
  }
  for (int k = 1; k < dec.subsystem_count(); ++k) {
    Eigen::VectorXcd x = dec.exponent(k).amplitudes();
    x.tail(nb) += delta_x.segment((k - 1) * nb, nb);
    dec.set_exponent(k, FockVector(dec.modes(), std::move(x)));
  }
}

namespace {

TrajectoryPoint snapshot(double t, const Decomposition& dec, const FockVector& psi,
                         const std::vector<ManyBodyOperator>& observables) {
  TrajectoryPoint point(dec, psi);
  point.t = t;
  point.compose_residual = dec.compose_residual(psi);
  point.subsystem_norms.reserve(dec.subsystem_count());
  for (int k = 0; k < dec.subsystem_count(); ++k) {
    point.subsystem_norms.push_back(dec.creator(k).norm());
  }
  point.beables = beables(dec, observables);
  return point;
}

}  // namespace

Trajectory integrate(const Decomposition& dec0, const ManyBodyOperator& h,
                     const IntegrateOptions& opts, const FockVector* psi0) {
  if (opts.dt == 0.0) throw Error("integrate: dt must be nonzero");
  if (opts.total_time < 0.0) throw Error("integrate: total time must be nonnegative");
  const long steps = std::lround(opts.total_time / std::abs(opts.dt));
  if (std::abs(steps * std::abs(opts.dt) - opts.total_time) > 1e-9 * std::abs(opts.dt) * (1 + steps)) {
    throw Error("integrate: total time is not a whole number of steps");
  }

  Decomposition dec = dec0;
  FockVector psi = psi0 ? *psi0 : dec.compose();
  if (!dec.has_v()) throw Error("integrate: decomposition has no solved subsystem");

  std::optional<SpectralCache> cache;
  if (opts.mode != StepMode::Plain && steps > 0) cache = SpectralCache::build(h);

  Trajectory traj;
  traj.mode = opts.mode;
  traj.points.reserve(steps + 1);

  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    traj.points.push_back(snapshot(t, dec, psi, opts.observables));
    StepResult step;
    try {
      step = opts.mode == StepMode::Plain
                 ? step_time_independent(dec, h, opts.dt, opts.step)
                 : step_time_dependent(dec, h, psi, opts.dt, opts.mode, opts.step);
    } catch (const StepTooLargeError& e) {
      traj.abort_reason = std::string("StepTooLarge: ") + e.what();
      return traj;
    } catch (const SingularSystemError& e) {
      traj.abort_reason = std::string("SingularSystem: ") + e.what();
      return traj;
    } catch (const DegenerateEnergyError& e) {
      traj.abort_reason = std::string("DegenerateEnergy: ") + e.what();
      return traj;
    } catch (const DegenerateNumberError& e) {
      traj.abort_reason = std::string("DegenerateNumber: ") + e.what();
      return traj;
    } catch (const NonInvertibleError& e) {
      traj.abort_reason = std::string("NonInvertible: ") + e.what();
      return traj;
    } catch (const Error& e) {
      traj.abort_reason = e.what();
      return traj;
    }
    traj.points.back().step = step.report;

    apply_exponent_step(dec, step.delta_x);
    if (opts.mode != StepMode::Plain) psi = propagate_exact(psi, *cache, opts.dt);
    dec.set_v(solve_v(psi, dec));
    t += opts.dt;
  }
  traj.points.push_back(snapshot(t, dec, psi, opts.observables));
  return traj;
}

ReversibilityReport reversibility_test(const Decomposition& dec, const ManyBodyOperator& h,
                                       const IntegrateOptions& opts, const FockVector* psi) {
  ReversibilityReport report;
  report.forward = integrate(dec, h, opts, psi);
  if (report.forward.aborted()) {
    throw Error("reversibility_test: forward leg aborted: " + report.forward.abort_reason);
  }
  IntegrateOptions back = opts;
  back.dt = -opts.dt;
  const TrajectoryPoint& end = report.forward.back();
  report.backward = integrate(end.dec, h, back, &end.psi);
  if (report.backward.aborted()) {
    throw Error("reversibility_test: backward leg aborted: " + report.backward.abort_reason);
  }
  report.return_distance_sq = hs_distance_sq(dec, report.backward.back().dec);
  return report;
}

StationarityReport stationarity_audit(const Decomposition& dec, const ManyBodyOperator& h,
                                      const FockVector* psi, double dt, StepMode mode,
                                      int trials, std::uint64_t seed, const StepOptions& opts) {
  const TangentFrame frame = tangent_frame(dec);
  const QuadraticForms forms =
      build_quadratic_forms(dec, frame, h, mode, psi);
  const auto [mu, nu] = assemble_mu_nu(forms);
  const RealBlockSystem system = real_block_system(mu, nu, forms.sigma);

  Eigen::LDLT<Eigen::MatrixXd> solver(system.eta);
  const Eigen::VectorXd pulled = solver.solve(system.sigma);
  const double chi = system.sigma.dot(pulled);
  check_chi_range(chi);
  const double c = forms.delta_a * dt / chi;
  const Eigen::VectorXd x = c * pulled;

  StationarityReport report;
  report.chi = chi;
  report.trials = trials;
  report.residual = (system.eta * x - c * system.sigma).norm() /
                    (std::abs(c) * system.sigma.norm());

  const double scale = x.norm();
  RandomSource rng(seed);
  constexpr double kPerturbation = 1e-4;
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd delta(x.size());
    for (int i = 0; i < delta.size(); ++i) delta[i] = rng.gaussian();
    delta *= scale / delta.norm();
    const double gain = chi_of(system, x + kPerturbation * delta) - chi;
    report.max_gain = std::max(report.max_gain, gain);
  }

  const double step_size = 1e-5 * scale;
  double grad_sq = 0.0;
  Eigen::VectorXd probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step_size;
    const double up = chi_of(system, probe);
    probe[i] = x[i] - step_size;
    const double down = chi_of(system, probe);
    probe[i] = x[i];
    const double g = (up - down) / (2.0 * step_size);
    grad_sq += g * g;
  }
  report.gradient_norm = std::sqrt(grad_sq) * scale;
  return report;
}

PermutationDivergenceReport permutation_divergence(
    const Decomposition& dec, const ManyBodyOperator& h, double dt, StepMode mode,
    const std::vector<int>& order_a, const std::vector<int>& order_b,
    const std::vector<ManyBodyOperator>& observables, const StepOptions& opts) {
  if (observables.empty()) {
    throw Error("permutation_divergence: need at least one observable");
  }
  IntegrateOptions iopts;
  iopts.mode = mode;
  iopts.dt = dt;
  iopts.total_time = std::abs(dt);
  iopts.step = opts;
  iopts.observables = observables;

  PermutationDivergenceReport report;
  std::vector<Eigen::MatrixXd> tables_t0, tables_after;
  for (const auto& order : {order_a, order_b}) {
    Decomposition d = dec;
    d.set_order(order);
    // Same subsystem contents, different total state.
    const FockVector psi = d.compose();
    Trajectory traj = integrate(d, h, iopts, &psi);
    if (traj.aborted()) {
      throw Error("permutation_divergence: step aborted: " + traj.abort_reason);
    }
    tables_t0.push_back(traj.points.front().beables);
    tables_after.push_back(traj.back().beables);
  }
  report.beable_distance_t0 =
      (tables_t0[0] - tables_t0[1]).cwiseAbs().maxCoeff();
  report.beable_distance_after_step =
      (tables_after[0] - tables_after[1]).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace fockdec
