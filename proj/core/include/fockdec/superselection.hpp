#pragma once

#include <Eigen/Dense>

#include "fockdec/decomposition.hpp"
#include "fockdec/geometry.hpp"

namespace fockdec {

/// Step data for dynamics on phase orbits. The energy operator is replaced by
/// its number-orthogonal component K, the sigma/beta/kappa/omega quantities
/// are rebuilt on the K scale, and two genuinely new pieces appear: the
/// number-direction vector xi and the scalar theta coupling it to sigma.
struct OrbitForms {
  Eigen::MatrixXcd eta_hat;
  Eigen::VectorXcd sigma;
  Eigen::VectorXcd beta;
  Eigen::VectorXcd xi;
  double omega = 1.0;
  double kappa = 0.0;
  double theta = 0.0;
  double delta_k = 0.0;
  double delta_e = 0.0;
  double delta_n = 0.0;
};

/// Builds the phase-orbit forms for one step. Throws DegenerateNumberError
/// when the combined number spread vanishes and DegenerateEnergyError when
/// the number-orthogonal energy spread does (then no time interval can move
/// the decomposition out of its orbit).
OrbitForms build_orbit_forms(const Decomposition& dec, const TangentFrame& frame,
                             const ManyBodyOperator& h, const FockVector& psi);

/// The mu/nu matrices of the phase-orbit step, ready for the real block
/// assembly. With xi = 0 and theta = 0 they reduce to the plain
/// time-dependent matrices with H replaced by K.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> orbit_mu_nu(const OrbitForms& forms);

}  // namespace fockdec
