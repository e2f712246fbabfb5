#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ctspin/config.hpp"
#include "ctspin/errors.hpp"
#include "ctspin/io.hpp"
#include "ctspin/units.hpp"

using namespace ctspin;
using nlohmann::json;

namespace {

json minimal(const std::string& kind) {
  json j;
  j["experiment"] = kind;
  return j;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ctspin-test-" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("defaults carry the reference parameter set") {
  const auto cfg = config::parse_config(minimal("density-scan"));
  CHECK(cfg.physics.d_ghz == -45.0);
  CHECK(cfg.physics.e_ghz == 4.5);
  CHECK(cfg.physics.bmin_mt == 23.6);
  CHECK(cfg.physics.b0_mt == 23.6);
  CHECK(cfg.spec.density == 0.001);
  CHECK(cfg.spec.n_spins == 6);
  CHECK(cfg.spec.n_configs == 200);
  CHECK(cfg.spec.cce.max_order == 3);
  CHECK(cfg.spec.cce.r_bath == 136.63);
  CHECK(cfg.spec.cce.r_dipole == 40.0);
  CHECK(cfg.spec.grid_points == 501);
  CHECK(cfg.spec.two_tau_max == 10.0);
  // converted into angular units
  CHECK(cfg.spec.params.e == units::ghz(4.5));
  CHECK(cfg.spec.params.d == units::ghz(-45.0));
}

TEST_CASE("unknown keys are named in the error") {
  auto j = minimal("two-spin");
  j["two_spin"] = {{"j_mhz", 1.0}, {"delta_mzh", 0.5}};  // typo
  try {
    config::parse_config(j);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("delta_mzh") != std::string::npos);
    CHECK(msg.find("unknown field") != std::string::npos);
  }
  auto top = minimal("two-spin");
  top["experimnt"] = "x";
  CHECK_THROWS_AS(config::parse_config(top), ConfigError);
}

TEST_CASE("range violations are rejected with the field path") {
  auto j = minimal("disorder-scan");
  j["ensemble"] = {{"gap_std_fraction", -0.1}};
  CHECK_THROWS_AS(config::parse_config(j), ConfigError);

  j = minimal("density-scan");
  j["scan"] = {{"densities", json::array({0.001, 1.5})}};
  CHECK_THROWS_AS(config::parse_config(j), ConfigError);

  j = minimal("density-scan");
  j["grid"] = {{"points", 1}};
  CHECK_THROWS_AS(config::parse_config(j), ConfigError);

  j = minimal("density-scan");
  j["ensemble"] = {{"engine", "cee"}};  // typo in value
  CHECK_THROWS_AS(config::parse_config(j), ConfigError);
}

TEST_CASE("experiment kind is required and recognized") {
  CHECK_THROWS_AS(config::parse_config(json::object()), ConfigError);
  CHECK_THROWS_AS(config::parse_config(minimal("frobnicate")), ConfigError);
  for (const char* kind :
       {"two-spin", "field-sweep", "electron-proton", "nspin-convergence",
        "density-scan", "disorder-scan", "uniformity", "cce-density",
        "cce-disorder"}) {
    const auto cfg = config::parse_config(minimal(kind));
    CHECK(config::kind_name(cfg.kind) == kind);
  }
}

TEST_CASE("cce experiment kinds force the cce engine") {
  auto j = minimal("cce-density");
  j["ensemble"] = {{"engine", "exact"}};
  const auto cfg = config::parse_config(j);
  CHECK(cfg.spec.engine == ensemble::Engine::Cce);
}

TEST_CASE("resolved dump round-trips exactly") {
  auto j = minimal("disorder-scan");
  j["seed"] = 12345;
  j["physics"] = {{"e_ghz", 4.321}, {"b0_mt", 25.0}};
  j["ensemble"] = {{"density", 0.01},
                   {"gap_std_fraction", 0.007},
                   {"fit_max_2tau_us", 6.25}};
  j["scan"] = {{"sigmas", json::array({0.0, 0.003, 0.016})}};
  const auto cfg = config::parse_config(j);
  const auto dump = config::resolved_json(cfg);
  const auto cfg2 = config::parse_config(dump);
  const auto dump2 = config::resolved_json(cfg2);
  CHECK(dump == dump2);
  CHECK(cfg2.spec.params.e == cfg.spec.params.e);
  CHECK(cfg2.spec.master_seed == 12345);
  REQUIRE(cfg2.spec.fit_max_2tau.has_value());
  CHECK(*cfg2.spec.fit_max_2tau == 6.25);
}

TEST_CASE("unit ingestion multiplies by 2 pi once") {
  auto j = minimal("two-spin");
  j["physics"] = {{"j_override_mhz", 2.5}};
  const auto cfg = config::parse_config(j);
  REQUIRE(cfg.spec.coupling.fixed_jzz.has_value());
  CHECK(*cfg.spec.coupling.fixed_jzz == units::mhz(2.5));
}

TEST_CASE("full precision CSV emission") {
  echo::CoherenceSeries s;
  s.two_tau = {0.0, 1.0 / 3.0};
  s.values = {1.0, 0.1234567890123456789};
  const std::string csv = io::coherence_csv(s);
  CHECK(csv.find("two_tau_us,L\n") == 0);
  // shortest round-trip forms parse back to the same doubles
  CHECK(csv.find("0.3333333333333333") != std::string::npos);
  CHECK(std::stod(csv.substr(csv.rfind(',') + 1)) ==
        0.1234567890123456789);
}

TEST_CASE("lattice json round trip") {
  const auto cell = lattice::default_unit_cell();
  const auto cube = lattice::build_dissected_cube(cell, 140);
  TempDir tmp;
  const auto path = (tmp.path / "lattice.json").string();
  io::write_lattice_json(path, cube);
  const auto back = io::read_lattice_json(path);
  CHECK(back.geometry == cube.geometry);
  CHECK(back.size() == cube.size());
  CHECK(back.central_site == cube.central_site);
  CHECK(back.region == cube.region);
  // coordinates are stored to 3 decimals
  for (std::size_t i = 0; i < cube.size(); ++i)
    CHECK((back.sites[i] - cube.sites[i]).lpNorm<Eigen::Infinity>() <=
          5.1e-4);
}

TEST_CASE("lattice json version gate") {
  const auto cell = lattice::default_unit_cell();
  const auto lat = lattice::sphere_with_site_count(cell, 20);
  auto j = io::lattice_to_json(lat);
  j.erase("format_version");
  CHECK_THROWS_AS(io::lattice_from_json(j), ConfigError);
  j["format_version"] = 999;
  CHECK_THROWS_AS(io::lattice_from_json(j), ConfigError);
}

TEST_CASE("manifest carries config, seed, version, counts") {
  io::RunManifest m;
  m.resolved_config = {{"experiment", "two-spin"}};
  m.seed = 42;
  m.wall_seconds = 1.5;
  m.accepted = 200;
  m.attempted = 231;
  m.outputs = {"series.csv"};
  const auto j = io::manifest_json(m);
  CHECK(j["seed"] == 42);
  CHECK(j["accepted"] == 200);
  CHECK(j["attempted"] == 231);
  CHECK(j["status"] == "ok");
  CHECK(j["version"] == "0.1.0");
  CHECK(j["resolved_config"]["experiment"] == "two-spin");
}

TEST_CASE("load_config reports missing files and bad json") {
  CHECK_THROWS_AS(config::load_config("/nonexistent/nope.json"), ConfigError);
  TempDir tmp;
  const auto path = (tmp.path / "broken.json").string();
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(config::load_config(path), ConfigError);
}
