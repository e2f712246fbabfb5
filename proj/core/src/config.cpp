#include "ctspin/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ctspin/errors.hpp"
#include "ctspin/units.hpp"

namespace ctspin::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

// Unknown keys are errors: silent typos in physics parameters are the
// costliest failure mode.
void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(join(path, item.key().c_str()), "unknown field");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

void read_number(const json& j, const std::string& path, const char* key,
                 double& out) {
  if (auto it = j.find(key); it != j.end())
    out = as_number(*it, join(path, key));
}

void read_optional_number(const json& j, const std::string& path,
                          const char* key, std::optional<double>& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (it->is_null())
      out.reset();
    else
      out = as_number(*it, join(path, key));
  }
}

void read_count(const json& j, const std::string& path, const char* key,
                std::size_t& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 0)
      fail(join(path, key), "expected a non-negative integer");
    out = it->get<std::size_t>();
  }
}

void read_bool(const json& j, const std::string& path, const char* key,
               bool& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (!it->is_boolean()) fail(join(path, key), "expected true or false");
    out = it->get<bool>();
  }
}

void read_string(const json& j, const std::string& path, const char* key,
                 std::string& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (!it->is_string()) fail(join(path, key), "expected a string");
    out = it->get<std::string>();
  }
}

void read_number_list(const json& j, const std::string& path, const char* key,
                      std::vector<double>& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (!it->is_array()) fail(join(path, key), "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < it->size(); ++i)
      out.push_back(as_number((*it)[i],
                              join(path, key) + "[" + std::to_string(i) + "]"));
  }
}

void parse_physics(const json& j, PhysicsInput& physics) {
  const std::string path = "physics";
  expect_object(j, path);
  check_keys(j, path,
             {"d_ghz", "e_ghz", "bmin_mt", "b0_mt", "gamma_e_mhz_per_mt",
              "gamma_ratio", "coupling_scale", "j_override_mhz"});
  read_number(j, path, "d_ghz", physics.d_ghz);
  read_number(j, path, "e_ghz", physics.e_ghz);
  read_number(j, path, "bmin_mt", physics.bmin_mt);
  read_number(j, path, "b0_mt", physics.b0_mt);
  read_number(j, path, "gamma_e_mhz_per_mt", physics.gamma_e_mhz_per_mt);
  read_number(j, path, "gamma_ratio", physics.gamma_ratio);
  read_number(j, path, "coupling_scale", physics.coupling_scale);
  read_optional_number(j, path, "j_override_mhz", physics.j_override_mhz);
}

void parse_grid(const json& j, ensemble::EnsembleSpec& spec) {
  const std::string path = "grid";
  expect_object(j, path);
  check_keys(j, path, {"two_tau_max_us", "points"});
  read_number(j, path, "two_tau_max_us", spec.two_tau_max);
  read_count(j, path, "points", spec.grid_points);
}

void parse_ensemble(const json& j, ensemble::EnsembleSpec& spec) {
  const std::string path = "ensemble";
  expect_object(j, path);
  check_keys(j, path,
             {"density", "n_spins", "n_configs", "geometry",
              "gap_std_fraction", "engine", "fit_max_2tau_us",
              "retain_series"});
  read_number(j, path, "density", spec.density);
  read_count(j, path, "n_spins", spec.n_spins);
  read_count(j, path, "n_configs", spec.n_configs);
  read_number(j, path, "gap_std_fraction", spec.gap_std_fraction);
  read_optional_number(j, path, "fit_max_2tau_us", spec.fit_max_2tau);
  read_bool(j, path, "retain_series", spec.retain_series);

  std::string geometry = spec.geometry == lattice::Geometry::Sphere
                             ? "sphere"
                             : "cube";
  read_string(j, path, "geometry", geometry);
  if (geometry == "sphere")
    spec.geometry = lattice::Geometry::Sphere;
  else if (geometry == "cube")
    spec.geometry = lattice::Geometry::DissectedCube;
  else
    fail("ensemble.geometry", "expected \"sphere\" or \"cube\"");

  std::string engine = spec.engine == ensemble::Engine::Exact ? "exact" : "cce";
  read_string(j, path, "engine", engine);
  if (engine == "exact")
    spec.engine = ensemble::Engine::Exact;
  else if (engine == "cce")
    spec.engine = ensemble::Engine::Cce;
  else
    fail("ensemble.engine", "expected \"exact\" or \"cce\"");
}

void parse_cce(const json& j, cce::CceConfig& cfg) {
  const std::string path = "cce";
  expect_object(j, path);
  check_keys(j, path,
             {"max_order", "r_bath", "r_dipole", "divergence_threshold",
              "zero_crossing_epsilon"});
  std::size_t order = static_cast<std::size_t>(cfg.max_order);
  read_count(j, path, "max_order", order);
  cfg.max_order = static_cast<int>(order);
  read_number(j, path, "r_bath", cfg.r_bath);
  read_number(j, path, "r_dipole", cfg.r_dipole);
  read_number(j, path, "divergence_threshold", cfg.divergence_threshold);
  read_number(j, path, "zero_crossing_epsilon", cfg.zero_crossing_epsilon);
}

void parse_two_spin(const json& j, TwoSpinParams& p) {
  const std::string path = "two_spin";
  expect_object(j, path);
  check_keys(j, path, {"j_mhz", "delta_mhz"});
  read_number(j, path, "j_mhz", p.j_mhz);
  read_number(j, path, "delta_mhz", p.delta_mhz);
}

void parse_field_sweep(const json& j, FieldSweepParams& p) {
  const std::string path = "field_sweep";
  expect_object(j, path);
  check_keys(j, path, {"span_mt", "points"});
  read_number(j, path, "span_mt", p.span_mt);
  read_count(j, path, "points", p.points);
}

void parse_electron_proton(const json& j, ElectronProtonParams& p) {
  const std::string path = "electron_proton";
  expect_object(j, path);
  check_keys(j, path, {"distance_angstrom", "offsets_mt", "full_tensor"});
  read_number(j, path, "distance_angstrom", p.distance_angstrom);
  read_number_list(j, path, "offsets_mt", p.offsets_mt);
  read_bool(j, path, "full_tensor", p.full_tensor);
}

void parse_scan(const json& j, ScanParams& p) {
  const std::string path = "scan";
  expect_object(j, path);
  check_keys(j, path, {"densities", "sigmas", "n_min", "n_max", "n_sites"});
  read_number_list(j, path, "densities", p.densities);
  read_number_list(j, path, "sigmas", p.sigmas);
  read_count(j, path, "n_min", p.n_min);
  read_count(j, path, "n_max", p.n_max);
  read_count(j, path, "n_sites", p.n_sites);
}

json optional_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::TwoSpin: return "two-spin";
    case ExperimentKind::FieldSweep: return "field-sweep";
    case ExperimentKind::ElectronProton: return "electron-proton";
    case ExperimentKind::NSpinConvergence: return "nspin-convergence";
    case ExperimentKind::DensityScan: return "density-scan";
    case ExperimentKind::DisorderScan: return "disorder-scan";
    case ExperimentKind::Uniformity: return "uniformity";
    case ExperimentKind::CceDensity: return "cce-density";
    case ExperimentKind::CceDisorder: return "cce-disorder";
  }
  throw ConfigError("unhandled experiment kind");
}

ExperimentKind parse_kind(const std::string& name) {
  static const std::pair<const char*, ExperimentKind> table[] = {
      {"two-spin", ExperimentKind::TwoSpin},
      {"field-sweep", ExperimentKind::FieldSweep},
      {"electron-proton", ExperimentKind::ElectronProton},
      {"nspin-convergence", ExperimentKind::NSpinConvergence},
      {"density-scan", ExperimentKind::DensityScan},
      {"disorder-scan", ExperimentKind::DisorderScan},
      {"uniformity", ExperimentKind::Uniformity},
      {"cce-density", ExperimentKind::CceDensity},
      {"cce-disorder", ExperimentKind::CceDisorder},
  };
  for (const auto& [n, k] : table)
    if (name == n) return k;
  std::ostringstream os;
  os << "unknown experiment kind \"" << name << "\"; expected one of";
  for (const auto& [n, k] : table) os << " " << n;
  throw ConfigError(os.str());
}

hamiltonian::QubitParams make_params(const PhysicsInput& physics) {
  hamiltonian::QubitParams p;
  p.d = units::ghz(physics.d_ghz);
  p.e = units::ghz(physics.e_ghz);
  p.bmin_mt = physics.bmin_mt;
  p.b0_mt = physics.b0_mt;
  p.gamma_e = units::gamma_angular(physics.gamma_e_mhz_per_mt);
  p.gamma_ratio = physics.gamma_ratio;
  return p;
}

hamiltonian::CouplingModel make_coupling(const PhysicsInput& physics) {
  hamiltonian::CouplingModel c;
  c.scale = physics.coupling_scale;
  if (physics.j_override_mhz) c.fixed_jzz = units::mhz(*physics.j_override_mhz);
  return c;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  expect_object(j, "config");
  check_keys(j, "",
             {"experiment", "output_dir", "seed", "threads", "physics",
              "grid", "ensemble", "cce", "two_spin", "field_sweep",
              "electron_proton", "scan"});

  ExperimentConfig cfg;
  std::string kind;
  if (auto it = j.find("experiment"); it != j.end()) {
    if (!it->is_string()) fail("experiment", "expected a string");
    kind = it->get<std::string>();
  } else {
    fail("experiment", "required field is missing");
  }
  cfg.kind = parse_kind(kind);

  read_string(j, "", "output_dir", cfg.output_dir);
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 0)
      fail("seed", "expected a non-negative integer");
    cfg.spec.master_seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("threads"); it != j.end()) {
    if (it->is_null()) {
      cfg.threads.reset();
    } else if (!it->is_number_integer() || it->get<long long>() < 1) {
      fail("threads", "expected a positive integer");
    } else {
      cfg.threads = it->get<unsigned>();
    }
  }

  if (auto it = j.find("physics"); it != j.end()) parse_physics(*it, cfg.physics);
  if (auto it = j.find("grid"); it != j.end()) parse_grid(*it, cfg.spec);
  if (auto it = j.find("ensemble"); it != j.end()) parse_ensemble(*it, cfg.spec);
  if (auto it = j.find("cce"); it != j.end()) parse_cce(*it, cfg.spec.cce);
  if (auto it = j.find("two_spin"); it != j.end())
    parse_two_spin(*it, cfg.two_spin);
  if (auto it = j.find("field_sweep"); it != j.end())
    parse_field_sweep(*it, cfg.field_sweep);
  if (auto it = j.find("electron_proton"); it != j.end())
    parse_electron_proton(*it, cfg.electron_proton);
  if (auto it = j.find("scan"); it != j.end()) parse_scan(*it, cfg.scan);

  // cce-* kinds imply the cluster-expansion engine
  if (cfg.kind == ExperimentKind::CceDensity ||
      cfg.kind == ExperimentKind::CceDisorder)
    cfg.spec.engine = ensemble::Engine::Cce;

  cfg.spec.params = make_params(cfg.physics);
  cfg.spec.coupling = make_coupling(cfg.physics);

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

void validate(const ExperimentConfig& cfg) {
  const auto& physics = cfg.physics;
  if (!(physics.e_ghz > 0.0)) fail("physics.e_ghz", "must be positive");
  if (!(physics.gamma_e_mhz_per_mt > 0.0))
    fail("physics.gamma_e_mhz_per_mt", "must be positive");
  if (!(physics.gamma_ratio > 0.0)) fail("physics.gamma_ratio", "must be positive");
  if (!(physics.coupling_scale >= 0.0))
    fail("physics.coupling_scale", "must be non-negative");
  if (!(physics.bmin_mt > 0.0)) fail("physics.bmin_mt", "must be positive");
  if (!(physics.b0_mt >= 0.0)) fail("physics.b0_mt", "must be non-negative");

  // range checks shared with the programmatic entry point
  ensemble::validate(cfg.spec);

  switch (cfg.kind) {
    case ExperimentKind::FieldSweep:
      if (!(cfg.field_sweep.span_mt > 0.0))
        fail("field_sweep.span_mt", "must be positive");
      if (cfg.field_sweep.points < 2)
        fail("field_sweep.points", "needs at least 2 points");
      break;
    case ExperimentKind::ElectronProton:
      if (!(cfg.electron_proton.distance_angstrom > 0.0))
        fail("electron_proton.distance_angstrom", "must be positive");
      if (cfg.electron_proton.offsets_mt.empty())
        fail("electron_proton.offsets_mt", "needs at least one offset");
      for (double v : cfg.electron_proton.offsets_mt)
        if (v < 0.0) fail("electron_proton.offsets_mt", "offsets are magnitudes, must be >= 0");
      break;
    case ExperimentKind::NSpinConvergence:
      if (cfg.scan.n_min < 1) fail("scan.n_min", "must be >= 1");
      if (cfg.scan.n_min > cfg.scan.n_max)
        fail("scan.n_max", "must be >= scan.n_min");
      if (cfg.scan.n_max > 14)
        fail("scan.n_max", "exact engine caps out at 14 spins");
      break;
    case ExperimentKind::DensityScan:
    case ExperimentKind::CceDensity:
      if (cfg.scan.densities.empty())
        fail("scan.densities", "needs at least one density");
      for (double x : cfg.scan.densities)
        if (!(x > 0.0) || x > 1.0)
          fail("scan.densities", "every density must lie in (0, 1]");
      break;
    case ExperimentKind::DisorderScan:
    case ExperimentKind::CceDisorder:
      if (cfg.scan.sigmas.empty())
        fail("scan.sigmas", "needs at least one sigma");
      for (double s : cfg.scan.sigmas)
        if (s < 0.0) fail("scan.sigmas", "sigma must be non-negative");
      break;
    case ExperimentKind::Uniformity:
      if (cfg.scan.n_sites < 7)
        fail("scan.n_sites", "needs at least 7 sites");
      if (cfg.spec.geometry != lattice::Geometry::Sphere)
        fail("ensemble.geometry",
             "the uniformity experiment manages both geometries itself; "
             "leave this at \"sphere\"");
      break;
    case ExperimentKind::TwoSpin:
      break;
  }
}

nlohmann::json resolved_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = kind_name(cfg.kind);
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.spec.master_seed;
  if (cfg.threads)
    j["threads"] = *cfg.threads;
  else
    j["threads"] = nullptr;

  json physics;
  physics["d_ghz"] = cfg.physics.d_ghz;
  physics["e_ghz"] = cfg.physics.e_ghz;
  physics["bmin_mt"] = cfg.physics.bmin_mt;
  physics["b0_mt"] = cfg.physics.b0_mt;
  physics["gamma_e_mhz_per_mt"] = cfg.physics.gamma_e_mhz_per_mt;
  physics["gamma_ratio"] = cfg.physics.gamma_ratio;
  physics["coupling_scale"] = cfg.physics.coupling_scale;
  physics["j_override_mhz"] = optional_to_json(cfg.physics.j_override_mhz);
  j["physics"] = physics;

  json grid;
  grid["two_tau_max_us"] = cfg.spec.two_tau_max;
  grid["points"] = cfg.spec.grid_points;
  j["grid"] = grid;

  json ens;
  ens["density"] = cfg.spec.density;
  ens["n_spins"] = cfg.spec.n_spins;
  ens["n_configs"] = cfg.spec.n_configs;
  ens["geometry"] =
      cfg.spec.geometry == lattice::Geometry::Sphere ? "sphere" : "cube";
  ens["gap_std_fraction"] = cfg.spec.gap_std_fraction;
  ens["engine"] =
      cfg.spec.engine == ensemble::Engine::Exact ? "exact" : "cce";
  ens["fit_max_2tau_us"] = optional_to_json(cfg.spec.fit_max_2tau);
  ens["retain_series"] = cfg.spec.retain_series;
  j["ensemble"] = ens;

  json cce_j;
  cce_j["max_order"] = cfg.spec.cce.max_order;
  cce_j["r_bath"] = cfg.spec.cce.r_bath;
  cce_j["r_dipole"] = cfg.spec.cce.r_dipole;
  cce_j["divergence_threshold"] = cfg.spec.cce.divergence_threshold;
  cce_j["zero_crossing_epsilon"] = cfg.spec.cce.zero_crossing_epsilon;
  j["cce"] = cce_j;

  json two;
  two["j_mhz"] = cfg.two_spin.j_mhz;
  two["delta_mhz"] = cfg.two_spin.delta_mhz;
  j["two_spin"] = two;

  json sweep;
  sweep["span_mt"] = cfg.field_sweep.span_mt;
  sweep["points"] = cfg.field_sweep.points;
  j["field_sweep"] = sweep;

  json ep;
  ep["distance_angstrom"] = cfg.electron_proton.distance_angstrom;
  ep["offsets_mt"] = cfg.electron_proton.offsets_mt;
  ep["full_tensor"] = cfg.electron_proton.full_tensor;
  j["electron_proton"] = ep;

  json scan;
  scan["densities"] = cfg.scan.densities;
  scan["sigmas"] = cfg.scan.sigmas;
  scan["n_min"] = cfg.scan.n_min;
  scan["n_max"] = cfg.scan.n_max;
  scan["n_sites"] = cfg.scan.n_sites;
  j["scan"] = scan;

  return j;
}

}  // namespace ctspin::config
