#include "fockdec/superselection.hpp"

#include <cmath>

#include "internal/frame_blocks.hpp"

namespace fockdec {

OrbitForms build_orbit_forms(const Decomposition& dec, const TangentFrame& frame,
                             const ManyBodyOperator& h, const FockVector& psi) {
  const KProjection kproj = k_operator(dec, h);
  const ManyBodyOperator n_op = total_number(dec.modes());
  const detail::ProjectedFrame proj = detail::project_frame(dec, frame);

  OrbitForms forms;
  forms.eta_hat = detail::eta_hat_matrix(frame, proj, /*include_v=*/true);
  forms.delta_e = detail::combined_spread(dec, frame, h, /*include_v=*/true);
  forms.delta_k = kproj.delta_k;
  forms.delta_n = kproj.delta_n;
  if (forms.delta_k <= kDegenerateRelTol * h.frobenius_norm()) {
    throw DegenerateEnergyError(
        "build_orbit_forms: energy spread orthogonal to the number direction "
        "vanishes, no time interval is defined on the orbit space");
  }

  const FockVector v_hpsi = v_functional_psi(dec, h * psi);
  const FockVector v_hpsi_orth = detail::project_out(dec.v(), v_hpsi);
  const double wv = frame.weights[0];
  const double dk2 = forms.delta_k * forms.delta_k;

  forms.omega = 1.0 -
      (wv * inner_product(v_hpsi_orth, kproj.k_op * dec.v()).real()) / dk2;
  if (std::abs(forms.omega) < 1e-10) {
    throw SingularSystemError("build_orbit_forms: renormalization factor vanishes");
  }
  forms.kappa = wv * v_hpsi_orth.squared_norm() / dk2;
  forms.theta = (wv * inner_product(v_hpsi_orth, n_op * dec.v()).real()) /
                (forms.delta_n * forms.delta_k);
  forms.beta = (wv / forms.delta_k) * (proj.gproj.adjoint() * v_hpsi.amplitudes());

  const Eigen::VectorXcd k_raw =
      detail::operator_vector(dec, frame, proj, kproj.k_op, /*include_v=*/true);
  forms.sigma = k_raw / (forms.omega * forms.delta_k);

  const Eigen::VectorXcd n_raw =
      detail::operator_vector(dec, frame, proj, n_op, /*include_v=*/true);
  forms.xi = n_raw / forms.delta_n;

  return forms;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> orbit_mu_nu(const OrbitForms& forms) {
  QuadraticForms q;
  q.mode = StepMode::PhaseOrbit;
  q.eta_hat = forms.eta_hat;
  q.sigma = forms.sigma;
  q.beta = forms.beta;
  q.xi = forms.xi;
  q.omega = forms.omega;
  q.kappa = forms.kappa;
  q.theta = forms.theta;
  q.delta_a = forms.delta_k;
  return assemble_mu_nu(q);
}

}  // namespace fockdec
