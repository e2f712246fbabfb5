#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ctspin/cce.hpp"
#include "ctspin/errors.hpp"
#include "ctspin/oracle.hpp"
#include "ctspin/rng.hpp"
#include "ctspin/units.hpp"

using namespace ctspin;

namespace {

lattice::SpinConfiguration line_config(const std::vector<double>& z) {
  lattice::SpinConfiguration c;
  for (std::size_t i = 0; i < z.size(); ++i) {
    c.positions.push_back(Eigen::Vector3d(0.0, 0.0, z[i]));
    c.site_indices.push_back(i);
  }
  return c;
}

// Infinite cutoffs and no discard thresholds: exactness tests must keep
// every configuration, including ones whose subclusters cross zero.
cce::CceConfig open_cce(int order) {
  cce::CceConfig cfg;
  cfg.max_order = order;
  cfg.r_bath = 1e9;
  cfg.r_dipole = 1e9;
  cfg.divergence_threshold = 1e30;
  cfg.zero_crossing_epsilon = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("cce config validation") {
  cce::CceConfig bad = open_cce(0);
  CHECK_THROWS_AS(cce::validate(bad), ConfigError);
  bad = open_cce(2);
  bad.r_dipole = 50.0;
  bad.r_bath = 40.0;  // r_bath < r_dipole
  CHECK_THROWS_AS(cce::validate(bad), ConfigError);
  bad = open_cce(2);
  bad.divergence_threshold = 0.0;
  CHECK_THROWS_AS(cce::validate(bad), ConfigError);
}

TEST_CASE("complete graph enumeration") {
  // central at 0; bath at 10, 20, 30: mutually within r_dipole
  const auto config = line_config({0.0, 10.0, 20.0, 30.0});
  cce::CceConfig cfg;
  cfg.max_order = 2;
  cfg.r_bath = 100.0;
  cfg.r_dipole = 25.0;
  const auto clusters = cce::enumerate_clusters(config, cfg);
  // 3 singletons + pairs {1,2},{2,3},{1,3}
  REQUIRE(clusters.size() == 6);
  CHECK(clusters[0] == cce::Cluster{1});
  CHECK(clusters[1] == cce::Cluster{2});
  CHECK(clusters[2] == cce::Cluster{3});
  CHECK(clusters[3] == cce::Cluster{1, 2});
  CHECK(clusters[4] == cce::Cluster{1, 3});
  CHECK(clusters[5] == cce::Cluster{2, 3});
}

TEST_CASE("disconnected pairs are excluded") {
  const auto config = line_config({0.0, 10.0, 200.0});
  cce::CceConfig cfg;
  cfg.max_order = 2;
  cfg.r_bath = 1000.0;
  cfg.r_dipole = 50.0;
  const auto clusters = cce::enumerate_clusters(config, cfg);
  REQUIRE(clusters.size() == 2);  // two singletons, no pair
  CHECK(clusters[0] == cce::Cluster{1});
  CHECK(clusters[1] == cce::Cluster{2});
}

TEST_CASE("bath cutoff removes distant spins entirely") {
  const auto config = line_config({0.0, 10.0, 500.0});
  cce::CceConfig cfg;
  cfg.max_order = 3;
  cfg.r_bath = 100.0;
  cfg.r_dipole = 100.0;
  const auto clusters = cce::enumerate_clusters(config, cfg);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0] == cce::Cluster{1});
}

TEST_CASE("cce1 with one bath spin equals the exact pair simulation") {
  const auto config = line_config({0.0, 12.0});
  hamiltonian::QubitParams p;
  const auto gaps = hamiltonian::GapAssignment::uniform(p.e, 2);
  const auto protocol = echo::EchoProtocol::over_two_tau(6.0, 121);
  const auto res = cce::compute_cce(config, p, gaps, protocol, open_cce(1));
  REQUIRE(res.valid);
  const auto h = hamiltonian::build_projected_n_spin(config, p, gaps);
  const auto exact = echo::hahn_echo(h, protocol, 0);
  for (std::size_t i = 0; i < exact.values.size(); ++i)
    CHECK(res.series.values[i] == doctest::Approx(exact.values[i]));
}

TEST_CASE("full-order cce reproduces exact diagonalization") {
  rng::Stream s(23);
  hamiltonian::QubitParams p;
  for (int rep = 0; rep < 2; ++rep) {
    // 2 bath spins at CCE2, then 3 bath spins at CCE3
    const std::size_t n_bath = 2 + static_cast<std::size_t>(rep);
    std::vector<double> z{0.0};
    for (std::size_t i = 0; i < n_bath; ++i)
      z.push_back(9.0 + 11.0 * static_cast<double>(i) + 3.0 * s.uniform());
    const auto config = line_config(z);
    hamiltonian::GapAssignment gaps;
    gaps.gaps.assign(config.size(), p.e);
    // small gap scatter keeps the dynamics generic
    for (std::size_t i = 1; i < config.size(); ++i)
      gaps.gaps[i] *= 1.0 + 1e-4 * s.normal();
    const auto protocol = echo::EchoProtocol::over_two_tau(4.0, 81);
    const auto res = cce::compute_cce(config, p, gaps, protocol,
                                      open_cce(static_cast<int>(n_bath)));
    REQUIRE(res.valid);
    const auto h = hamiltonian::build_projected_n_spin(config, p, gaps);
    const auto exact = echo::hahn_echo(h, protocol, 0);
    for (std::size_t i = 0; i < exact.values.size(); ++i)
      CHECK(std::abs(res.series.values[i] - exact.values[i]) < 1e-8);
  }
}

TEST_CASE("assemble is independent of contribution order") {
  const auto config = line_config({0.0, 10.0, 21.0, 33.0});
  hamiltonian::QubitParams p;
  const auto gaps = hamiltonian::GapAssignment::uniform(p.e, 4);
  const auto protocol = echo::EchoProtocol::over_two_tau(3.0, 31);
  const auto cfg = open_cce(3);

  const auto clusters = cce::enumerate_clusters(config, cfg);
  std::vector<cce::RawContribution> raw;
  for (const auto& cluster : clusters) {
    cce::RawContribution r;
    r.cluster = cluster;
    r.values =
        cce::cluster_coherence(cluster, config, p, gaps, protocol).values;
    raw.push_back(std::move(r));
  }
  const auto direct = cce::assemble(raw, cfg);
  REQUIRE(direct.valid);

  std::mt19937 shuffler(99);
  for (int rep = 0; rep < 5; ++rep) {
    auto shuffled = raw;
    std::shuffle(shuffled.begin(), shuffled.end(), shuffler);
    const auto again = cce::assemble(shuffled, cfg);
    REQUIRE(again.valid);
    for (std::size_t i = 0; i < direct.values.size(); ++i)
      CHECK(again.values[i] == direct.values[i]);
  }
}

TEST_CASE("tilde contributions start at one and the product starts at one") {
  const auto config = line_config({0.0, 10.0, 21.0});
  hamiltonian::QubitParams p;
  const auto gaps = hamiltonian::GapAssignment::uniform(p.e, 3);
  const auto protocol = echo::EchoProtocol::over_two_tau(3.0, 31);
  const auto cfg = open_cce(2);
  const auto res = cce::compute_cce(config, p, gaps, protocol, cfg);
  REQUIRE(res.valid);
  CHECK(res.series.values[0] == doctest::Approx(1.0));
}

TEST_CASE("a divergent contribution invalidates the assembly") {
  cce::CceConfig cfg = open_cce(2);
  cfg.divergence_threshold = 10.0;
  // synthetic contributions: singleton crosses zero, pair divides by it
  std::vector<cce::RawContribution> raw(3);
  raw[0].cluster = {1};
  raw[0].values = {1.0, 1e-9, 0.5};  // nearly zero at the middle point
  raw[1].cluster = {2};
  raw[1].values = {1.0, 0.9, 0.8};
  raw[2].cluster = {1, 2};
  raw[2].values = {1.0, 0.5, 0.4};
  const auto out = cce::assemble(raw, cfg);
  CHECK_FALSE(out.valid);
  CHECK(out.divergent_clusters > 0);
}

TEST_CASE("zero-crossing epsilon flags division by tiny values") {
  cce::CceConfig cfg = open_cce(2);
  cfg.zero_crossing_epsilon = 1e-6;
  cfg.divergence_threshold = 1e12;  // threshold alone would not trip
  std::vector<cce::RawContribution> raw(2);
  raw[0].cluster = {1};
  raw[0].values = {1.0, 1e-9};
  raw[1].cluster = {1, 2};  // subcluster {2} missing -> only {1} divides
  raw[1].values = {1.0, 0.5};
  // include {2} so the parent is covered
  cce::RawContribution single2;
  single2.cluster = {2};
  single2.values = {1.0, 0.7};
  raw.push_back(single2);
  const auto out = cce::assemble(raw, cfg);
  CHECK_FALSE(out.valid);
}
