#include "fockdec/geometry.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "fockdec/superselection.hpp"
#include "internal/frame_blocks.hpp"

namespace fockdec {

namespace detail {

FockVector project_out(const FockVector& u, const FockVector& w) {
  const double n2 = u.squared_norm();
  if (n2 == 0.0) throw Error("project_out: zero-norm reference");
  FockVector out = w;
  out -= (inner_product(u, w) / n2) * u;
  return out;
}

ProjectedFrame project_frame(const Decomposition& dec, const TangentFrame& frame) {
  ProjectedFrame proj;
  proj.fproj.reserve(frame.m - 1);
  const int dim = frame.modes.dim();
  const int nb = frame.basis_size();

  for (int k = 1; k < frame.m; ++k) {
    const auto& u = dec.creator(k).amplitudes();
    const double w = frame.weights[k];
    Eigen::MatrixXcd fp = frame.f[k - 1];
    fp.noalias() -= u * (w * (u.adjoint() * frame.f[k - 1]));
    proj.fproj.push_back(std::move(fp));
  }

  const auto& v = dec.v().amplitudes();
  const double wv = frame.weights[0];
  proj.gproj.resize(dim, frame.coefficient_count());
  for (int k = 1; k < frame.m; ++k) {
    proj.gproj.middleCols((k - 1) * nb, nb) = frame.g[k - 1];
  }
  proj.gproj.noalias() -= v * (wv * (v.adjoint() * proj.gproj));
  return proj;
}

Eigen::MatrixXcd eta_hat_matrix(const TangentFrame& frame, const ProjectedFrame& proj,
                                bool include_v) {
  const int n = frame.coefficient_count();
  const int nb = frame.basis_size();
  Eigen::MatrixXcd eta = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 1; k < frame.m; ++k) {
    eta.block((k - 1) * nb, (k - 1) * nb, nb, nb) =
        frame.weights[k] * (proj.fproj[k - 1].adjoint() * proj.fproj[k - 1]);
  }
  if (include_v) {
    eta.noalias() += frame.weights[0] * (proj.gproj.adjoint() * proj.gproj);
  }
  // Symmetrize away the roundoff skew so downstream factorizations see an
  // exactly hermitian matrix.
  return 0.5 * (eta + eta.adjoint().eval());
}

Eigen::VectorXcd operator_vector(const Decomposition& dec, const TangentFrame& frame,
                                 const ProjectedFrame& proj, const ManyBodyOperator& a,
                                 bool include_v) {
  const int nb = frame.basis_size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(frame.coefficient_count());
  for (int k = 1; k < frame.m; ++k) {
    const Eigen::VectorXcd au = a.matrix() * dec.creator(k).amplitudes();
    out.segment((k - 1) * nb, nb) = frame.weights[k] * (proj.fproj[k - 1].adjoint() * au);
  }
  if (include_v) {
    const Eigen::VectorXcd av = a.matrix() * dec.v().amplitudes();
    out.noalias() += frame.weights[0] * (proj.gproj.adjoint() * av);
  }
  return out;
}

double combined_spread(const Decomposition& dec, const TangentFrame& frame,
                       const ManyBodyOperator& a, bool include_v) {
  double sum = 0.0;
  for (int k = include_v ? 0 : 1; k < frame.m; ++k) {
    const FockVector& u = dec.creator(k);
    const FockVector orth = project_out(u, a * u);
    sum += frame.weights[k] * orth.squared_norm();
  }
  return std::sqrt(sum);
}

}  // namespace detail

DirectSumVector direct_sum_difference(const Decomposition& dec, const Decomposition& other) {
  if (dec.subsystem_count() != other.subsystem_count() || !(dec.modes() == other.modes())) {
    throw Error("direct_sum_difference: decompositions do not match");
  }
  DirectSumVector out;
  const int m = dec.subsystem_count();
  out.components.reserve(m);
  out.weights.reserve(m);
  for (int k = 0; k < m; ++k) {
    out.components.push_back(other.creator(k) - dec.creator(k));
    const double n2 = dec.creator(k).squared_norm();
    if (n2 == 0.0) throw Error("direct_sum_difference: zero-norm subsystem");
    out.weights.push_back(1.0 / n2);
  }
  return out;
}

Complex ds_inner(const DirectSumVector& a, const DirectSumVector& b) {
  if (a.components.size() != b.components.size()) {
    throw Error("ds_inner: dimension mismatch");
  }
  Complex acc(0.0, 0.0);
  for (std::size_t k = 0; k < a.components.size(); ++k) {
    acc += a.weights[k] * inner_product(a.components[k], b.components[k]);
  }
  return acc;
}

double hs_distance_sq(const Decomposition& dec, const Decomposition& other) {
  if (dec.subsystem_count() != other.subsystem_count() || !(dec.modes() == other.modes())) {
    throw Error("hs_distance_sq: decompositions do not match");
  }
  double sum = 0.0;
  for (int k = 0; k < dec.subsystem_count(); ++k) {
    const FockVector& a = dec.creator(k);
    const FockVector& b = other.creator(k);
    const double na = a.squared_norm(), nb = b.squared_norm();
    if (na == 0.0 || nb == 0.0) throw Error("hs_distance_sq: zero-norm subsystem");
    sum += 1.0 - std::norm(inner_product(a, b)) / (na * nb);
  }
  return sum;
}

double fs_eta(const Decomposition& dec, const DirectSumVector& delta_u) {
  if (static_cast<int>(delta_u.components.size()) != dec.subsystem_count()) {
    throw Error("fs_eta: dimension mismatch");
  }
  double sum = 0.0;
  for (int k = 0; k < dec.subsystem_count(); ++k) {
    const FockVector& u = dec.creator(k);
    const FockVector& du = delta_u.components[k];
    const double n2 = u.squared_norm();
    if (n2 == 0.0) throw Error("fs_eta: zero-norm subsystem");
    sum += (du.squared_norm() - std::norm(inner_product(u, du)) / n2) / n2;
  }
  return sum;
}

GeometryContext build_geometry_context(const Decomposition& dec, const ManyBodyOperator& h) {
  GeometryContext ctx;
  const int m = dec.subsystem_count();
  ctx.subsystems.reserve(m);
  ctx.weights.reserve(m);
  ctx.h_orth.reserve(m);
  double var = 0.0;
  for (int k = 0; k < m; ++k) {
    const FockVector& u = dec.creator(k);
    const double n2 = u.squared_norm();
    if (n2 == 0.0) throw Error("build_geometry_context: zero-norm subsystem");
    ctx.subsystems.push_back(u);
    ctx.weights.push_back(1.0 / n2);
    ctx.h_orth.push_back(detail::project_out(u, h * u));
    var += ctx.h_orth.back().squared_norm() / n2;
  }
  ctx.delta_e = std::sqrt(var);
  ctx.energy_scale = h.frobenius_norm();
  return ctx;
}

namespace {

Complex du_dot_h(const GeometryContext& ctx, const DirectSumVector& delta_u) {
  if (delta_u.components.size() != ctx.h_orth.size()) {
    throw Error("time functional: dimension mismatch");
  }
  Complex acc(0.0, 0.0);
  for (std::size_t k = 0; k < ctx.h_orth.size(); ++k) {
    acc += ctx.weights[k] * inner_product(delta_u.components[k], ctx.h_orth[k]);
  }
  return acc;
}

double eta_of(const GeometryContext& ctx, const DirectSumVector& delta_u) {
  double sum = 0.0;
  for (std::size_t k = 0; k < ctx.subsystems.size(); ++k) {
    const FockVector& u = ctx.subsystems[k];
    const FockVector& du = delta_u.components[k];
    sum += ctx.weights[k] *
           (du.squared_norm() - ctx.weights[k] * std::norm(inner_product(u, du)));
  }
  return sum;
}

}  // namespace

double lambda_curve(const GeometryContext& ctx, const DirectSumVector& delta_u, double dtau) {
  const double eta = eta_of(ctx, delta_u);
  const double cross = du_dot_h(ctx, delta_u).imag();
  return eta - 2.0 * dtau * cross + dtau * dtau * ctx.delta_e * ctx.delta_e;
}

double time_functional(const GeometryContext& ctx, const DirectSumVector& delta_u) {
  if (ctx.delta_e <= kDegenerateRelTol * ctx.energy_scale) {
    throw DegenerateEnergyError("time_functional: combined energy spread vanishes");
  }
  return du_dot_h(ctx, delta_u).imag() / (ctx.delta_e * ctx.delta_e);
}

QuadraticForms build_quadratic_forms(const Decomposition& dec, const TangentFrame& frame,
                                     const ManyBodyOperator& h, StepMode mode,
                                     const FockVector* psi) {
  if (mode == StepMode::PhaseOrbit) {
    if (psi == nullptr) throw Error("build_quadratic_forms: phase-orbit mode needs the total state");
    const OrbitForms of = build_orbit_forms(dec, frame, h, *psi);
    QuadraticForms forms;
    forms.mode = mode;
    forms.eta_hat = of.eta_hat;
    forms.sigma = of.sigma;
    forms.beta = of.beta;
    forms.xi = of.xi;
    forms.omega = of.omega;
    forms.kappa = of.kappa;
    forms.theta = of.theta;
    forms.delta_a = of.delta_k;
    forms.delta_e = of.delta_e;
    forms.delta_n = of.delta_n;
    return forms;
  }

  const bool include_v = mode != StepMode::Unconstrained;
  const detail::ProjectedFrame proj = detail::project_frame(dec, frame);

  QuadraticForms forms;
  forms.mode = mode;
  forms.eta_hat = detail::eta_hat_matrix(frame, proj, include_v);
  forms.delta_e = detail::combined_spread(dec, frame, h, include_v);
  forms.delta_a = forms.delta_e;
  if (forms.delta_e <= kDegenerateRelTol * h.frobenius_norm()) {
    throw DegenerateEnergyError("build_quadratic_forms: combined energy spread vanishes");
  }

  Eigen::VectorXcd raw = detail::operator_vector(dec, frame, proj, h, include_v);

  if (mode == StepMode::TimeDependent) {
    if (psi == nullptr) throw Error("build_quadratic_forms: time-dependent mode needs the total state");
    const FockVector v_hpsi = v_functional_psi(dec, h * (*psi));
    const FockVector v_hpsi_orth = detail::project_out(dec.v(), v_hpsi);
    const double wv = frame.weights[0];
    const double de2 = forms.delta_e * forms.delta_e;

    forms.omega = 1.0 -
        (wv * inner_product(v_hpsi_orth, h * dec.v()).real()) / de2;
    if (std::abs(forms.omega) < 1e-10) {
      throw SingularSystemError("build_quadratic_forms: renormalization factor vanishes");
    }
    forms.kappa = wv * v_hpsi_orth.squared_norm() / de2;
    forms.beta = (wv / forms.delta_e) * (proj.gproj.adjoint() * v_hpsi.amplitudes());
  }

  forms.sigma = raw / (forms.omega * forms.delta_a);
  return forms;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> assemble_mu_nu(const QuadraticForms& forms) {
  const int n = forms.size();
  Eigen::MatrixXcd mu = forms.eta_hat;
  Eigen::MatrixXcd nu = Eigen::MatrixXcd::Zero(n, n);

  const Eigen::VectorXcd& s = forms.sigma;
  const double kappa_eff = forms.kappa - forms.theta * forms.theta;

  if (forms.beta.size() == n) {
    mu.noalias() += 0.5 * (forms.beta * s.adjoint() + s * forms.beta.adjoint());
    nu.noalias() -= 0.5 * (forms.beta * s.transpose() + s * forms.beta.transpose());
  }
  if (kappa_eff != 0.0) {
    mu.noalias() += (0.5 * kappa_eff) * (s * s.adjoint());
    nu.noalias() -= (0.5 * kappa_eff) * (s * s.transpose());
  }
  if (forms.xi.size() == n) {
    mu.noalias() -= 0.5 * (forms.xi * forms.xi.adjoint());
    nu.noalias() += 0.5 * (forms.xi * forms.xi.transpose());
    if (forms.theta != 0.0) {
      mu.noalias() -= (0.5 * forms.theta) * (forms.xi * s.adjoint() + s * forms.xi.adjoint());
      nu.noalias() += (0.5 * forms.theta) * (forms.xi * s.transpose() + s * forms.xi.transpose());
    }
  }
  return {std::move(mu), std::move(nu)};
}

KProjection k_operator(const Decomposition& dec, const ManyBodyOperator& h) {
  const ManyBodyOperator n_op = total_number(dec.modes());
  const int m = dec.subsystem_count();

  std::vector<FockVector> h_orth, n_orth;
  std::vector<double> weights(m);
  double nn = 0.0;
  Complex hn(0.0, 0.0);
  for (int k = 0; k < m; ++k) {
    const FockVector& u = dec.creator(k);
    const double n2 = u.squared_norm();
    if (n2 == 0.0) throw Error("k_operator: zero-norm subsystem");
    weights[k] = 1.0 / n2;
    h_orth.push_back(detail::project_out(u, h * u));
    n_orth.push_back(detail::project_out(u, n_op * u));
    nn += weights[k] * n_orth.back().squared_norm();
    hn += weights[k] * inner_product(h_orth[k], n_orth[k]);
  }

  const double number_scale = static_cast<double>(dec.modes().modes());
  if (std::sqrt(nn) <= kDegenerateRelTol * number_scale) {
    throw DegenerateNumberError("k_operator: combined number spread vanishes");
  }

  // The coefficient is real whenever H conserves particle number; only the
  // real part enters so that K stays hermitian.
  const double c = hn.real() / nn;

  KProjection out{ManyBodyOperator(dec.modes(),
                                   h.matrix() - Complex(c) * n_op.matrix(),
                                   h.hermitian()),
                  {}, 0.0, std::sqrt(nn), c};
  double kk = 0.0;
  for (int k = 0; k < m; ++k) {
    FockVector korth = h_orth[k];
    korth -= Complex(c) * n_orth[k];
    kk += weights[k] * korth.squared_norm();
    out.k_orth.push_back(std::move(korth));
  }
  out.delta_k = std::sqrt(kk);
  return out;
}

double phase_orbit_distance_small(const Decomposition& dec, const DirectSumVector& delta_u) {
  const ManyBodyOperator n_op = total_number(dec.modes());
  const int m = dec.subsystem_count();
  double nn = 0.0;
  Complex du_n(0.0, 0.0);
  for (int k = 0; k < m; ++k) {
    const FockVector& u = dec.creator(k);
    const double n2 = u.squared_norm();
    if (n2 == 0.0) throw Error("phase_orbit_distance_small: zero-norm subsystem");
    const FockVector north = detail::project_out(u, n_op * u);
    nn += north.squared_norm() / n2;
    du_n += inner_product(delta_u.components[k], north) / n2;
  }
  const double dn = std::sqrt(nn);
  if (dn <= kDegenerateRelTol * dec.modes().modes()) {
    throw DegenerateNumberError("phase_orbit_distance_small: combined number spread vanishes");
  }
  const double xi = du_n.imag() / dn;
  return fs_eta(dec, delta_u) - xi * xi;
}

double OrbitDistance::lambda(double phi) const {
  double g = 0.0;
  for (int l = 1; l <= harmonics.size(); ++l) {
    const Complex gl = harmonics[l - 1];
    g += -gl.real() * std::cos(l * phi) + gl.imag() * std::sin(l * phi);
  }
  return constant + 2.0 * g;
}

OrbitDistance phase_orbit_distance_finite(const Decomposition& dec, const Decomposition& other) {
  if (dec.subsystem_count() != other.subsystem_count() || !(dec.modes() == other.modes())) {
    throw Error("phase_orbit_distance_finite: decompositions do not match");
  }
  const int d = dec.modes().modes();
  const std::uint32_t dim = dec.modes().mask_limit();
  const int m = dec.subsystem_count();

  // M(n, n') = sum_k <u_k|P_n|u'_k><u'_k|P_n'|u_k> / norms, hermitian.
  Eigen::MatrixXcd overlap = Eigen::MatrixXcd::Zero(d + 1, d + 1);
  for (int k = 0; k < m; ++k) {
    const FockVector& a = dec.creator(k);
    const FockVector& b = other.creator(k);
    const double na = a.squared_norm(), nb = b.squared_norm();
    if (na == 0.0 || nb == 0.0) {
      throw Error("phase_orbit_distance_finite: zero-norm subsystem");
    }
    Eigen::VectorXcd sector = Eigen::VectorXcd::Zero(d + 1);
    for (std::uint32_t mask = 0; mask < dim; ++mask) {
      sector[std::popcount(mask)] += std::conj(a[mask]) * b[mask];
    }
    overlap.noalias() += (sector * sector.adjoint()) / (na * nb);
  }

  OrbitDistance out;
  double g0 = 0.0;
  for (int n = 0; n <= d; ++n) g0 += overlap(n, n).real();
  out.constant = static_cast<double>(m) - g0;
  out.harmonics = Eigen::VectorXcd::Zero(d);
  for (int l = 1; l <= d; ++l) {
    Complex gl(0.0, 0.0);
    for (int n = 0; n + l <= d; ++n) gl += overlap(n + l, n);
    out.harmonics[l - 1] = gl;
  }

  const auto g_derivs = [&](double phi) {
    double g1 = 0.0, g2 = 0.0;
    for (int l = 1; l <= d; ++l) {
      const Complex gl = out.harmonics[l - 1];
      g1 += l * (gl.real() * std::sin(l * phi) + gl.imag() * std::cos(l * phi));
      g2 += l * l * (gl.real() * std::cos(l * phi) - gl.imag() * std::sin(l * phi));
    }
    return std::pair<double, double>{g1, g2};
  };

  constexpr int kGridPoints = 256;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double best_phi = 0.0;
  double best_val = out.lambda(0.0);
  for (int j = 1; j < kGridPoints; ++j) {
    const double phi = kTwoPi * j / kGridPoints;
    const double val = out.lambda(phi);
    if (val < best_val) {
      best_val = val;
      best_phi = phi;
    }
  }

  double phi = best_phi;
  bool polished = false;
  for (int it = 0; it < 50; ++it) {
    const auto [g1, g2] = g_derivs(phi);
    if (std::abs(g1) < 1e-12) {
      polished = g2 > 0.0;
      break;
    }
    if (g2 <= 0.0) break;
    phi -= g1 / g2;
  }
  if (polished && out.lambda(phi) <= best_val) {
    best_phi = phi;
    best_val = out.lambda(phi);
  }

  best_phi = std::fmod(best_phi, kTwoPi);
  if (best_phi < 0.0) best_phi += kTwoPi;
  out.phi_star = best_phi;
  out.distance_sq = best_val;
  return out;
}

}  // namespace fockdec
