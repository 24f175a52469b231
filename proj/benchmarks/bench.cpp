#include <benchmark/benchmark.h>

#include "fockdec/dynamics.hpp"
#include "fockdec/random.hpp"

using namespace fockdec;

namespace {

FockVector random_state(ModeSpace ms, std::uint64_t seed, double scale = 1.0) {
  RandomSource rng(seed);
  Eigen::VectorXcd amp(ms.dim());
  for (int i = 0; i < amp.size(); ++i) amp[i] = scale * rng.complex_gaussian();
  return {ms, std::move(amp)};
}

Decomposition random_decomposition(ModeSpace ms, int m, std::uint64_t seed) {
  Decomposition dec(ms, m);
  RandomSource rng(seed);
  for (int k = 1; k < m; ++k) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(ms.dim());
    for (int i = 1; i < ms.dim(); ++i) x[i] = 0.15 * rng.complex_gaussian();
    dec.set_exponent(k, FockVector(ms, std::move(x)));
  }
  dec.set_v(FockVector::vacuum_unit(ms));
  return dec;
}

void BM_psi_product(benchmark::State& state) {
  const ModeSpace ms(static_cast<int>(state.range(0)));
  const FockVector a = random_state(ms, 1);
  const FockVector b = random_state(ms, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi_product(a, b));
  }
}
BENCHMARK(BM_psi_product)->Arg(6)->Arg(8)->Arg(10)->Arg(12);

void BM_creator_exp(benchmark::State& state) {
  const ModeSpace ms(static_cast<int>(state.range(0)));
  const FockVector x = random_state(ms, 3, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(creator_exp(x));
  }
}
BENCHMARK(BM_creator_exp)->Arg(8)->Arg(10);

void BM_creator_matrix(benchmark::State& state) {
  const ModeSpace ms(static_cast<int>(state.range(0)));
  const FockVector u = random_state(ms, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(creator_matrix(u));
  }
}
BENCHMARK(BM_creator_matrix)->Arg(8)->Arg(10);

void BM_solve_v(benchmark::State& state) {
  const ModeSpace ms(static_cast<int>(state.range(0)));
  const Decomposition dec = random_decomposition(ms, 3, 5);
  const FockVector psi = random_state(ms, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_v(psi, dec));
  }
}
BENCHMARK(BM_solve_v)->Arg(6)->Arg(8);

void BM_tangent_frame(benchmark::State& state) {
  const ModeSpace ms(static_cast<int>(state.range(0)));
  Decomposition dec = random_decomposition(ms, 3, 7);
  dec.set_v(solve_v(random_state(ms, 8), dec));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tangent_frame(dec));
  }
}
BENCHMARK(BM_tangent_frame)->Arg(4)->Arg(6);

void BM_build_hubbard(benchmark::State& state) {
  const HubbardParams params{.sites = static_cast<int>(state.range(0)),
                             .spinful = false,
                             .t = 1.0,
                             .u = 0.0,
                             .v = 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_hubbard(params));
  }
}
BENCHMARK(BM_build_hubbard)->Arg(8)->Arg(10);

void BM_step_time_dependent(benchmark::State& state) {
  const HubbardParams params{.sites = static_cast<int>(state.range(0)),
                             .spinful = false,
                             .t = 1.0,
                             .u = 0.0,
                             .v = 2.0};
  const ManyBodyOperator h = build_hubbard(params);
  const Decomposition dec = random_decomposition(h.modes(), 3, 9);
  const FockVector psi = dec.compose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(step_time_dependent(dec, h, psi, 1e-3, StepMode::TimeDependent));
  }
}
BENCHMARK(BM_step_time_dependent)->Arg(4)->Arg(6);

void BM_orbit_distance_finite(benchmark::State& state) {
  const ModeSpace ms(static_cast<int>(state.range(0)));
  const Decomposition a = random_decomposition(ms, 3, 10);
  const Decomposition b = random_decomposition(ms, 3, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(phase_orbit_distance_finite(a, b));
  }
}
BENCHMARK(BM_orbit_distance_finite)->Arg(8)->Arg(10);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
