#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fockdec/decomposition.hpp"
#include "fockdec/geometry.hpp"

namespace fockdec {

/// Diagnostics of one solved stability step.
struct StabilityReport {
  double chi = 0.0;        // sigma^2 / eta, in [0, 1]
  double sigma = 0.0;      // delta_a * dt
  double eta = 0.0;        // squared step distance
  double c = 0.0;          // solve scale, delta_a * dt / chi
  double dt = 0.0;
  double delta_a = 0.0;    // energy spread (number-orthogonal in orbit mode)
  double condition = 0.0;  // condition estimate of the solved system
};

struct StepResult {
  Eigen::VectorXcd delta_x;
  StabilityReport report;
};

struct StepOptions {
  double eta_guard = 1e-2;        // quadratic-regime bound on the step distance
  double condition_limit = 1e12;  // beyond this the solve is refused
};

/// Real symmetric form of the step system: the 2n x 2n metric over
/// (Re dx, Im dx) and the right-hand side (Im sigma, -Re sigma).
struct RealBlockSystem {
  Eigen::MatrixXd eta;
  Eigen::VectorXd sigma;
};

RealBlockSystem real_block_system(const Eigen::MatrixXcd& mu, const Eigen::MatrixXcd& nu,
                                  const Eigen::VectorXcd& sigma);

/// Stability step with the total state held fixed: the complex solve
/// eta_hat dx = -i C sigma with C = delta_e * dt / chi.
StepResult step_time_independent(const Decomposition& dec, const ManyBodyOperator& h,
                                 double dt, const StepOptions& opts = {});

/// Stability step with an evolving total state, in the requested mode, via
/// the real block solve. With psi an eigenstate this reproduces the
/// time-independent step.
StepResult step_time_dependent(const Decomposition& dec, const ManyBodyOperator& h,
                               const FockVector& psi, double dt, StepMode mode,
                               const StepOptions& opts = {});

/// Adds solved exponent changes onto the decomposition (vacuum components
/// untouched) and refreshes the cached creators.
void apply_exponent_step(Decomposition& dec, const Eigen::VectorXcd& delta_x);

struct TrajectoryPoint {
  double t = 0.0;
  Decomposition dec;
  FockVector psi;
  double compose_residual = 0.0;
  std::vector<double> subsystem_norms;
  Eigen::MatrixXd beables;  // rows = subsystems, cols = observables
  std::optional<StabilityReport> step;  // the step leaving this point

  TrajectoryPoint(Decomposition d, FockVector p) : dec(std::move(d)), psi(std::move(p)) {}
};

struct Trajectory {
  StepMode mode = StepMode::TimeDependent;
  std::vector<TrajectoryPoint> points;
  std::string abort_reason;  // empty on a clean run

  bool aborted() const { return !abort_reason.empty(); }
  const TrajectoryPoint& back() const { return points.back(); }
};

struct IntegrateOptions {
  StepMode mode = StepMode::TimeDependent;
  double dt = 1e-2;
  double total_time = 1.0;
  StepOptions step;
  std::vector<ManyBodyOperator> observables;
};

/// Fixed-step integration: solve a step, add the exponent changes, evolve the
/// total state exactly (except in plain mode, which holds it fixed), re-solve
/// the determined subsystem, record. A step failure ends the trajectory early
/// with the reason recorded.
///
/// The decomposition must have its solved subsystem set. If `psi` is null the
/// initial total state is compose(dec).
Trajectory integrate(const Decomposition& dec, const ManyBodyOperator& h,
                     const IntegrateOptions& opts, const FockVector* psi = nullptr);

struct ReversibilityReport {
  double return_distance_sq = 0.0;  // squared HS distance start vs returned
  Trajectory forward;
  Trajectory backward;
};

/// Integrates forward over the full interval, then backward with the sign of
/// dt flipped, and measures how far from the start the trajectory returns.
ReversibilityReport reversibility_test(const Decomposition& dec, const ManyBodyOperator& h,
                                       const IntegrateOptions& opts,
                                       const FockVector* psi = nullptr);

struct StationarityReport {
  double chi = 0.0;
  double max_gain = 0.0;       // largest chi increase over random perturbations
  double gradient_norm = 0.0;  // scale-free central-difference gradient at the solution
  double residual = 0.0;       // relative residual of the solved linear system
  int trials = 0;
};

/// Checks numerically that the solved step is a stationary global maximum of
/// the stability functional.
StationarityReport stationarity_audit(const Decomposition& dec, const ManyBodyOperator& h,
                                      const FockVector* psi, double dt, StepMode mode,
                                      int trials, std::uint64_t seed,
                                      const StepOptions& opts = {});

struct PermutationDivergenceReport {
  double beable_distance_t0 = 0.0;
  double beable_distance_after_step = 0.0;
};

/// Runs one step of the same decomposition under two product orders and
/// reports the largest beable-table difference before and after. Identical
/// before; generically different after, unless every variable subsystem has
/// definite parity.
PermutationDivergenceReport permutation_divergence(
    const Decomposition& dec, const ManyBodyOperator& h, double dt, StepMode mode,
    const std::vector<int>& order_a, const std::vector<int>& order_b,
    const std::vector<ManyBodyOperator>& observables, const StepOptions& opts = {});

/// chi of an arbitrary real-block coefficient vector against given forms.
double chi_of(const RealBlockSystem& system, const Eigen::VectorXd& x);

}  // namespace fockdec
