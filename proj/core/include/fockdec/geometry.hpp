#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fockdec/decomposition.hpp"
#include "fockdec/fock.hpp"
#include "fockdec/operators.hpp"

namespace fockdec {

/// Direct sum of per-subsystem kets with the reference normalization buried
/// in the inner product: <a|b> = sum_k <a_k|b_k> / <u_k|u_k>.
struct DirectSumVector {
  std::vector<FockVector> components;
  std::vector<double> weights;
};

/// Per-subsystem differences u'_k - u_k with the weights of `dec`.
DirectSumVector direct_sum_difference(const Decomposition& dec, const Decomposition& other);

Complex ds_inner(const DirectSumVector& a, const DirectSumVector& b);

/// Squared Hilbert-Schmidt distance between the projector direct sums:
/// sum_k [1 - |<u_k|u'_k>|^2 / (<u_k|u_k><u'_k|u'_k>)]. In [0, m] and
/// independent of the product order.
double hs_distance_sq(const Decomposition& dec, const Decomposition& other);

/// Quadratic combined-subsystem metric sum_k <du_k|(1-rho_k)|du_k> / <u_k|u_k>;
/// agrees with hs_distance_sq to third order in the change.
double fs_eta(const Decomposition& dec, const DirectSumVector& delta_u);

/// Energy geometry of a decomposition: the orthogonal components of H|u_k>
/// and the combined energy spread.
struct GeometryContext {
  std::vector<FockVector> subsystems;   // u_k, k = 0..m-1
  std::vector<double> weights;          // 1 / <u_k|u_k>
  std::vector<FockVector> h_orth;       // (1 - rho_k) H |u_k>
  double delta_e = 0.0;                 // sqrt(sum_k w_k |h_orth_k|^2)
  double energy_scale = 0.0;            // degeneracy guard scale for H
};

GeometryContext build_geometry_context(const Decomposition& dec, const ManyBodyOperator& h);

/// Energy-spread floor, relative to the operator scale, below which time
/// intervals are treated as undefined.
inline constexpr double kDegenerateRelTol = 1e-12;

/// The squared distance between `delta_u` and an ideal evolution of duration
/// dtau: eta - 2 dtau Im<du|H> + dtau^2 <H|H>. Quadratic in dtau.
double lambda_curve(const GeometryContext& ctx, const DirectSumVector& delta_u, double dtau);

/// The duration that minimizes lambda_curve: Im<du|H> / <H|H>. Satisfies
/// delta_e^2 dt^2 <= fs_eta. Throws DegenerateEnergyError when the energy
/// spread vanishes.
double time_functional(const GeometryContext& ctx, const DirectSumVector& delta_u);

/// How a stability step treats the total state.
enum class StepMode {
  Plain,          // total state held fixed
  TimeDependent,  // total state follows its exact evolution
  PhaseOrbit,     // time-dependent, on phase orbits (H replaced by K)
  Unconstrained,  // time-dependent with every solved-subsystem term dropped
};

/// Quadratic data of one stability step over the tangent frame: the metric
/// matrix, the sigma vector (scaled by 1/(omega * delta_a)), and the
/// correction scalars and vectors of the time-dependent and phase-orbit
/// branches. delta_a is the energy spread, or its number-orthogonal part in
/// phase-orbit mode.
struct QuadraticForms {
  StepMode mode = StepMode::Plain;
  Eigen::MatrixXcd eta_hat;
  Eigen::VectorXcd sigma;
  Eigen::VectorXcd beta;
  Eigen::VectorXcd xi;
  double omega = 1.0;
  double kappa = 0.0;
  double theta = 0.0;
  double delta_a = 0.0;
  double delta_e = 0.0;
  double delta_n = 0.0;

  int size() const { return static_cast<int>(eta_hat.rows()); }
};

/// Assembles the step forms. `psi` is required for the time-dependent,
/// phase-orbit, and unconstrained modes and ignored in plain mode.
QuadraticForms build_quadratic_forms(const Decomposition& dec, const TangentFrame& frame,
                                     const ManyBodyOperator& h, StepMode mode,
                                     const FockVector* psi = nullptr);

/// mu = eta_hat + (beta sigma^dag + sigma beta^dag + (kappa - theta^2) sigma sigma^dag
///                 - xi xi^dag - theta (xi sigma^dag + sigma xi^dag)) / 2,
/// nu = -(same products without conjugation) / 2. mu is hermitian, nu symmetric.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> assemble_mu_nu(const QuadraticForms& forms);

/// Component of the energy geometry orthogonal to the number geometry:
/// K = H - c N with c = <H|N> / <N|N>, so that <K|N> = 0.
struct KProjection {
  ManyBodyOperator k_op;
  std::vector<FockVector> k_orth;  // (1 - rho_k) K |u_k>
  double delta_k = 0.0;
  double delta_n = 0.0;
  double coefficient = 0.0;        // c (real part; exact when [H, N] = 0)
};

KProjection k_operator(const Decomposition& dec, const ManyBodyOperator& h);

/// Small-change squared distance between phase orbits: fs_eta minus the
/// squared component along the number direction. At most fs_eta, at least 0.
double phase_orbit_distance_small(const Decomposition& dec, const DirectSumVector& delta_u);

/// Finite distance between the phase orbits of two decompositions, from the
/// harmonics of the overlap between number sectors.
struct OrbitDistance {
  double distance_sq = 0.0;
  double phi_star = 0.0;
  double constant = 0.0;           // m - G_0
  Eigen::VectorXcd harmonics;      // G_l for l = 1..d

  /// lambda(phi) = constant + 2 g(phi); distance_sq = min over phi.
  double lambda(double phi) const;
};

OrbitDistance phase_orbit_distance_finite(const Decomposition& dec, const Decomposition& other);

}  // namespace fockdec
