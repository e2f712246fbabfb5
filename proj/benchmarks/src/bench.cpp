// Microbenchmarks for the hot paths: eigensolves, echo series evaluation,
// cluster bookkeeping, and lattice construction.  Run manually; these are
// not part of the test suite.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "ctspin/cce.hpp"
#include "ctspin/echo.hpp"
#include "ctspin/ensemble.hpp"
#include "ctspin/hamiltonian.hpp"
#include "ctspin/lattice.hpp"
#include "ctspin/rng.hpp"

using namespace ctspin;

namespace {

lattice::SpinConfiguration sampled_config(std::size_t n_spins,
                                          std::uint64_t seed) {
  const auto cell = lattice::default_unit_cell();
  const auto lat = lattice::sphere_with_site_count(cell, 40 * n_spins);
  rng::Stream stream(seed);
  return lattice::sample_configuration(lat, n_spins, stream);
}

void echo_series(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto config = sampled_config(n, 7);
  hamiltonian::QubitParams params;
  const auto gaps = hamiltonian::GapAssignment::uniform(params.e, n);
  const auto h = hamiltonian::build_projected_n_spin(config, params, gaps);
  const auto protocol = echo::EchoProtocol::over_two_tau(2.0, 201);
  for (auto _ : state) {
    const auto series = echo::hahn_echo(h, protocol);
    benchmark::DoNotOptimize(series.values.data());
  }
}

void hamiltonian_eigensolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto config = sampled_config(n, 11);
  hamiltonian::QubitParams params;
  const auto gaps = hamiltonian::GapAssignment::uniform(params.e, n);
  for (auto _ : state) {
    const auto h =
        hamiltonian::build_projected_n_spin(config, params, gaps);
    benchmark::DoNotOptimize(h.eigenvalues.data());
  }
}

void cluster_enumeration(benchmark::State& state) {
  const auto config =
      sampled_config(static_cast<std::size_t>(state.range(0)), 13);
  cce::CceConfig cfg;
  cfg.max_order = 3;
  for (auto _ : state) {
    const auto clusters = cce::enumerate_clusters(config, cfg);
    benchmark::DoNotOptimize(clusters.data());
  }
}

void cce_full(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto config = sampled_config(n, 17);
  hamiltonian::QubitParams params;
  const auto gaps = hamiltonian::GapAssignment::uniform(params.e, n);
  const auto protocol = echo::EchoProtocol::over_two_tau(2.0, 201);
  cce::CceConfig cfg;
  cfg.max_order = 3;
  cfg.divergence_threshold = 1e30;
  cfg.zero_crossing_epsilon = 0.0;
  for (auto _ : state) {
    const auto result =
        cce::compute_cce(config, params, gaps, protocol, cfg);
    benchmark::DoNotOptimize(result.series.values.data());
  }
}

void sphere_generation(benchmark::State& state) {
  const auto cell = lattice::default_unit_cell();
  const auto radius = static_cast<double>(state.range(0));
  for (auto _ : state) {
    const auto lat = lattice::generate_sphere_sites(cell, radius);
    benchmark::DoNotOptimize(lat.sites.data());
  }
  state.counters["sites"] = static_cast<double>(
      lattice::generate_sphere_sites(cell, radius).size());
}

void dissected_cube_generation(benchmark::State& state) {
  const auto cell = lattice::default_unit_cell();
  for (auto _ : state) {
    const auto lat = lattice::build_dissected_cube(
        cell, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(lat.sites.data());
  }
}

}  // namespace

BENCHMARK(echo_series)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(hamiltonian_eigensolve)->Arg(4)->Arg(6)->Arg(8);
BENCHMARK(cluster_enumeration)->Arg(8)->Arg(16);
BENCHMARK(cce_full)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(sphere_generation)->Arg(30)->Arg(66)->Arg(105);
BENCHMARK(dissected_cube_generation)->Arg(700)->Arg(7000);

BENCHMARK_MAIN();
