#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ctspin/ensemble.hpp"
#include "ctspin/errors.hpp"
#include "ctspin/rng.hpp"

using namespace ctspin;

namespace {

ensemble::EnsembleSpec quick_spec() {
  ensemble::EnsembleSpec spec;
  spec.density = 0.1;
  spec.n_spins = 4;
  spec.n_configs = 10;
  spec.two_tau_max = 2.0;
  spec.grid_points = 51;
  spec.master_seed = 77;
  return spec;
}

}  // namespace

TEST_CASE("sample_gaps pins the central spin and respects sigma") {
  rng::Stream s(1);
  const auto flat = ensemble::sample_gaps(10.0, 0.0, 5, s);
  REQUIRE(flat.gaps.size() == 5);
  for (double g : flat.gaps) CHECK(g == 10.0);

  rng::Stream s2(2);
  const auto spread = ensemble::sample_gaps(10.0, 0.016, 2000, s2);
  CHECK(spread.gaps[0] == 10.0);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 1; i < spread.gaps.size(); ++i) {
    CHECK(spread.gaps[i] > 0.0);
    sum += spread.gaps[i];
    sq += spread.gaps[i] * spread.gaps[i];
  }
  const double n = static_cast<double>(spread.gaps.size() - 1);
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(mean == doctest::Approx(10.0).epsilon(2e-3));
  // sampled std over E recovers sigma within statistical scatter
  CHECK(sd / 10.0 == doctest::Approx(0.016).epsilon(0.07));
}

TEST_CASE("spec validation rejects bad inputs") {
  auto spec = quick_spec();
  spec.density = 0.0;
  CHECK_THROWS_AS(ensemble::validate(spec), ConfigError);
  spec = quick_spec();
  spec.density = 1.5;
  CHECK_THROWS_AS(ensemble::validate(spec), ConfigError);
  spec = quick_spec();
  spec.gap_std_fraction = -0.1;
  CHECK_THROWS_AS(ensemble::validate(spec), ConfigError);
  spec = quick_spec();
  spec.geometry = lattice::Geometry::DissectedCube;  // needs 7 spins
  CHECK_THROWS_AS(ensemble::validate(spec), ConfigError);
  spec = quick_spec();
  spec.engine = ensemble::Engine::Cce;
  spec.cce.max_order = 5;  // bath has only 3 spins
  CHECK_THROWS_AS(ensemble::validate(spec), ConfigError);
}

TEST_CASE("single-config mean equals the one retained series") {
  auto spec = quick_spec();
  spec.n_configs = 1;
  spec.retain_series = true;
  const auto result = ensemble::run_ensemble(spec);
  REQUIRE(result.per_config.size() == 1);
  REQUIRE(result.accepted == 1);
  for (std::size_t i = 0; i < result.mean.values.size(); ++i)
    CHECK(result.mean.values[i] == result.per_config[0].values[i]);
}

TEST_CASE("mean starts at exactly one and stays bounded") {
  const auto result = ensemble::run_ensemble(quick_spec());
  CHECK(result.mean.values[0] == 1.0);
  for (double v : result.mean.values) CHECK(std::abs(v) <= 1.0 + 1e-9);
}

TEST_CASE("mean is the arithmetic mean of the retained series") {
  auto spec = quick_spec();
  spec.retain_series = true;
  const auto result = ensemble::run_ensemble(spec);
  REQUIRE(result.per_config.size() == spec.n_configs);
  for (std::size_t i = 0; i < result.mean.values.size(); ++i) {
    double acc = 0.0;
    for (const auto& series : result.per_config) acc += series.values[i];
    CHECK(result.mean.values[i] ==
          doctest::Approx(acc / static_cast<double>(spec.n_configs))
              .epsilon(1e-14));
  }
}

TEST_CASE("thread count never changes the result") {
  auto spec = quick_spec();
  spec.threads = 1;
  const auto serial = ensemble::run_ensemble(spec);
  spec.threads = 3;
  const auto parallel = ensemble::run_ensemble(spec);
  REQUIRE(serial.mean.values.size() == parallel.mean.values.size());
  for (std::size_t i = 0; i < serial.mean.values.size(); ++i)
    CHECK(serial.mean.values[i] == parallel.mean.values[i]);
  CHECK(serial.attempted == parallel.attempted);
  CHECK(serial.fit.t2 == parallel.fit.t2);
}

TEST_CASE("different master seeds give different ensembles") {
  auto spec = quick_spec();
  const auto a = ensemble::run_ensemble(spec);
  spec.master_seed = spec.master_seed + 1;
  const auto b = ensemble::run_ensemble(spec);
  bool any_different = false;
  for (std::size_t i = 0; i < a.mean.values.size(); ++i)
    if (a.mean.values[i] != b.mean.values[i]) any_different = true;
  CHECK(any_different);
}

TEST_CASE("run_ensemble rejects a lattice of the wrong geometry") {
  const auto spec = quick_spec();
  const auto cube = lattice::build_dissected_cube(
      lattice::default_unit_cell(), 70);
  CHECK_THROWS_AS(ensemble::run_ensemble(spec, cube), ConfigError);
}

TEST_CASE("disorder scan sigma=0 row is bit-identical to the plain run") {
  auto spec = quick_spec();
  spec.gap_std_fraction = 0.0;
  const auto base = ensemble::run_ensemble(spec);
  const auto rows = ensemble::disorder_scan({0.0, 0.01}, spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].fit.t2 == base.fit.t2);
  CHECK(rows[0].fit.beta == base.fit.beta);
}

TEST_CASE("density scan rows carry geometry bookkeeping") {
  auto spec = quick_spec();
  spec.n_configs = 5;
  const auto rows = ensemble::density_scan({0.05, 0.1}, spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].radius > rows[1].radius);
  CHECK(rows[0].n_sites >= 4 * 20 - 2);  // about n/x sites
  for (const auto& r : rows) {
    CHECK(r.accepted == 5);
    CHECK(r.attempted == 5);  // exact engine never discards
    CHECK(r.fit.t2 > 0.0);
  }
}

TEST_CASE("convergence scan pairs ensembles across N") {
  auto spec = quick_spec();
  spec.n_configs = 6;
  spec.density = 0.05;
  const auto scan = ensemble::convergence_scan_nspins(3, 5, spec);
  REQUIRE(scan.rows.size() == 3);
  CHECK(scan.accepted == 6);
  CHECK(scan.attempted == 6);
  for (std::size_t i = 0; i + 1 < scan.rows.size(); ++i) {
    CHECK(scan.rows[i].n_spins + 1 == scan.rows[i + 1].n_spins);
    CHECK(scan.rows[i].n_sites < scan.rows[i + 1].n_sites);
  }
}

TEST_CASE("uniformity experiment is deterministic and returns both arms") {
  auto spec = quick_spec();
  spec.n_configs = 3;
  spec.two_tau_max = 1.0;
  spec.grid_points = 41;
  const auto a = ensemble::uniformity_experiment(140, 7, 3, spec);
  const auto b = ensemble::uniformity_experiment(140, 7, 3, spec);
  CHECK(a.random_fit.t2 == b.random_fit.t2);
  CHECK(a.uniform_fit.t2 == b.uniform_fit.t2);
  CHECK(a.random_mean.values[0] == 1.0);
  CHECK(a.uniform_mean.values[0] == 1.0);
  CHECK_THROWS_AS(ensemble::uniformity_experiment(140, 6, 3, spec),
                  ConfigError);
}

TEST_CASE("cce ensembles run end to end and count attempts") {
  auto spec = quick_spec();
  spec.n_spins = 4;
  spec.n_configs = 4;
  spec.engine = ensemble::Engine::Cce;
  spec.cce.max_order = 2;
  spec.cce.r_bath = 1e9;
  spec.cce.r_dipole = 1e9;
  spec.cce.divergence_threshold = 1e30;
  spec.cce.zero_crossing_epsilon = 0.0;
  const auto result = ensemble::run_ensemble(spec);
  CHECK(result.accepted == 4);
  CHECK(result.attempted >= result.accepted);
  CHECK(result.mean.values[0] == doctest::Approx(1.0));
}

TEST_CASE("unreachable cce acceptance aborts with a diagnostic") {
  auto spec = quick_spec();
  spec.n_spins = 3;
  spec.n_configs = 1;
  spec.grid_points = 11;
  spec.two_tau_max = 0.5;
  spec.engine = ensemble::Engine::Cce;
  spec.cce.max_order = 2;
  spec.cce.divergence_threshold = 1e-12;  // everything trips
  CHECK_THROWS_AS(ensemble::run_ensemble(spec), EngineError);
}
