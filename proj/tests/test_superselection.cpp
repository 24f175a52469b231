#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fockdec/dynamics.hpp"
#include "fockdec/random.hpp"
#include "fockdec/superselection.hpp"
#include "oracle.hpp"

using namespace fockdec;

namespace {

const HubbardParams kModel{.sites = 4, .spinful = false, .t = 1.0, .u = 0.0, .v = 2.0};

Decomposition seeded_decomposition(ModeSpace ms, int m, std::uint64_t seed, double scale) {
  Decomposition dec(ms, m);
  RandomSource rng(seed);
  for (int k = 1; k < m; ++k) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(ms.dim());
    for (int i = 1; i < ms.dim(); ++i) x[i] = scale * rng.complex_gaussian();
    dec.set_exponent(k, FockVector(ms, std::move(x)));
  }
  dec.set_v(FockVector::vacuum_unit(ms));
  return dec;
}

}  // namespace

TEST_CASE("orbit forms on an eigenstate: all total-state corrections vanish") {
  const ManyBodyOperator h = build_hubbard(kModel);
  const ModeSpace ms = h.modes();
  const SpectralCache cache = SpectralCache::build(h);

  Decomposition dec = seeded_decomposition(ms, 3, 1, 0.2);
  const FockVector psi{ms, cache.eigenvectors.col(6)};
  dec.set_v(solve_v(psi, dec));
  const TangentFrame frame = tangent_frame(dec);
  const OrbitForms forms = build_orbit_forms(dec, frame, h, psi);

  CHECK(std::abs(forms.omega - 1.0) < 1e-9);
  CHECK(forms.beta.norm() < 1e-9);
  CHECK(std::abs(forms.kappa) < 1e-9);
  CHECK(std::abs(forms.theta) < 1e-9);
  CHECK(forms.delta_k <= forms.delta_e + 1e-12);
  CHECK(forms.delta_k > 0.0);
}

TEST_CASE("energy proportional to number leaves the orbit frozen") {
  const ModeSpace ms(4);
  const ManyBodyOperator cn = Complex(0.9) * total_number(ms);
  Decomposition dec = seeded_decomposition(ms, 2, 2, 0.3);
  const FockVector psi = dec.compose();
  const TangentFrame frame = tangent_frame(dec);
  CHECK_THROWS_AS(build_orbit_forms(dec, frame, cn, psi), DegenerateEnergyError);
}

TEST_CASE("number eigenstate decompositions have no orbit direction") {
  const ModeSpace ms(3);
  const ManyBodyOperator h = build_hubbard({.sites = 3, .spinful = false, .t = 1.0});
  Decomposition dec(ms, 2);
  dec.set_v(FockVector::basis_state(ms, 5));  // fixed particle number
  const FockVector psi = dec.compose();
  const TangentFrame frame = tangent_frame(dec);
  CHECK_THROWS_AS(build_orbit_forms(dec, frame, h, psi), DegenerateNumberError);
}

TEST_CASE("orbit matrices: symmetries and the xi = theta = 0 reduction") {
  const ManyBodyOperator h = build_hubbard(kModel);
  const ModeSpace ms = h.modes();

  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Decomposition dec = seeded_decomposition(ms, 3, 10 + seed, 0.2);
    const FockVector psi = dec.compose();
    const TangentFrame frame = tangent_frame(dec);
    const OrbitForms forms = build_orbit_forms(dec, frame, h, psi);
    const auto [mu, nu] = orbit_mu_nu(forms);

    CHECK((mu - mu.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((nu - nu.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    const RealBlockSystem system = real_block_system(mu, nu, forms.sigma);
    CHECK((system.eta - system.eta.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    // Removing the genuinely new pieces leaves the time-dependent matrices
    // with the reduced energy operator.
    OrbitForms stripped = forms;
    stripped.xi.setZero();
    stripped.theta = 0.0;
    const auto [mu0, nu0] = orbit_mu_nu(stripped);
    QuadraticForms td;
    td.mode = StepMode::TimeDependent;
    td.eta_hat = forms.eta_hat;
    td.sigma = forms.sigma;
    td.beta = forms.beta;
    td.omega = forms.omega;
    td.kappa = forms.kappa;
    td.delta_a = forms.delta_k;
    const auto [mu1, nu1] = assemble_mu_nu(td);
    CHECK((mu0 - mu1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((nu0 - nu1).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("one orbit step commutes with a global phase") {
  const ManyBodyOperator h = build_hubbard(kModel);
  const ModeSpace ms = h.modes();

  for (double phi : {0.4, 1.9, 4.4}) {
    Decomposition dec = seeded_decomposition(ms, 3, 20, 0.2);
    dec.set_v(solve_v(oracle::random_vector(ms, 21), dec));
    const FockVector psi = dec.compose();

    IntegrateOptions opts;
    opts.mode = StepMode::PhaseOrbit;
    opts.dt = 5e-3;
    opts.total_time = 5e-3;

    const Trajectory stepped = integrate(dec, h, opts, &psi);
    REQUIRE_FALSE(stepped.aborted());
    const Decomposition step_then_phase = apply_phase(stepped.back().dec, phi);

    const Decomposition rotated = apply_phase(dec, phi);
    const FockVector psi_rot = apply_number_phase(psi, phi);
    const Trajectory rotated_step = integrate(rotated, h, opts, &psi_rot);
    REQUIRE_FALSE(rotated_step.aborted());

    const OrbitDistance gap =
        phase_orbit_distance_finite(step_then_phase, rotated_step.back().dec);
    CHECK(std::abs(gap.distance_sq) < 1e-9);
  }
}

TEST_CASE("orbit machinery with the number pieces removed is the plain machinery") {
  // When every number-derived component vanishes identically the reduced
  // operator is the full one and the orbit assembly collapses, term by term,
  // onto the plain time-dependent assembly.
  const ManyBodyOperator h = build_hubbard(kModel);
  const ModeSpace ms = h.modes();
  Decomposition dec = seeded_decomposition(ms, 3, 33, 0.2);
  const FockVector psi = dec.compose();
  const TangentFrame frame = tangent_frame(dec);
  const QuadraticForms td =
      build_quadratic_forms(dec, frame, h, StepMode::TimeDependent, &psi);

  OrbitForms degenerate;
  degenerate.eta_hat = td.eta_hat;
  degenerate.sigma = td.sigma;
  degenerate.beta = td.beta;
  degenerate.xi = Eigen::VectorXcd::Zero(td.sigma.size());
  degenerate.omega = td.omega;
  degenerate.kappa = td.kappa;
  degenerate.theta = 0.0;
  degenerate.delta_k = td.delta_e;
  degenerate.delta_e = td.delta_e;

  const auto [mu_orbit, nu_orbit] = orbit_mu_nu(degenerate);
  const auto [mu_plain, nu_plain] = assemble_mu_nu(td);
  CHECK((mu_orbit - mu_plain).cwiseAbs().maxCoeff() == 0.0);
  CHECK((nu_orbit - nu_plain).cwiseAbs().maxCoeff() == 0.0);

  const RealBlockSystem a = real_block_system(mu_orbit, nu_orbit, degenerate.sigma);
  const RealBlockSystem b = real_block_system(mu_plain, nu_plain, td.sigma);
  CHECK((a.eta.ldlt().solve(a.sigma) - b.eta.ldlt().solve(b.sigma)).norm() == 0.0);
}

TEST_CASE("orbit sigma vector carries the omega and delta_k scaling") {
  const ManyBodyOperator h = build_hubbard(kModel);
  const ModeSpace ms = h.modes();
  Decomposition dec = seeded_decomposition(ms, 3, 41, 0.2);
  const FockVector psi = dec.compose();
  const TangentFrame frame = tangent_frame(dec);
  const OrbitForms forms = build_orbit_forms(dec, frame, h, psi);

  // Rebuild sigma by hand from the reduced operator.
  const KProjection kp = k_operator(dec, h);
  const QuadraticForms via_geometry =
      build_quadratic_forms(dec, frame, h, StepMode::PhaseOrbit, &psi);
  CHECK((via_geometry.sigma - forms.sigma).norm() < 1e-14);
  CHECK(via_geometry.delta_a == forms.delta_k);
  CHECK(std::abs(forms.delta_k - kp.delta_k) < 1e-14);
}
