#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctspin/ensemble.hpp"

// Declarative experiment configs: strict JSON parsing (unknown keys are
// errors), range validation, and a fully resolved dump that round-trips.
namespace ctspin::config {

enum class ExperimentKind {
  TwoSpin,          // central + one bath spin, oscillatory echo
  FieldSweep,       // level diagram vs B0, full model and 2-level reduction
  ElectronProton,   // 6-dim electron-proton echo vs field offset
  NSpinConvergence, // T2 vs bath size
  DensityScan,      // T2 vs spin density
  DisorderScan,     // T2 vs gap spread
  Uniformity,       // random vs spatially uniform placement
  CceDensity,       // density scan on the cluster-expansion engine
  CceDisorder,      // disorder scan on the cluster-expansion engine
};

std::string kind_name(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

// Physics constants in boundary units. Kept verbatim so the resolved
// dump reproduces the input bit for bit; conversion to internal angular
// units is a pure function of these fields.
struct PhysicsInput {
  double d_ghz = -45.0;
  double e_ghz = 4.5;
  double bmin_mt = 23.6;
  double b0_mt = 23.6;
  double gamma_e_mhz_per_mt = 28.02495;
  double gamma_ratio = 658.21;
  double coupling_scale = 1.0;
  std::optional<double> j_override_mhz;
};

hamiltonian::QubitParams make_params(const PhysicsInput& physics);
hamiltonian::CouplingModel make_coupling(const PhysicsInput& physics);

struct TwoSpinParams {
  double j_mhz = 1.0;      // zz coupling override
  double delta_mhz = 0.0;  // bath gap offset from E
};

struct FieldSweepParams {
  double span_mt = 15.0;  // sweep is Bmin +/- span
  std::size_t points = 61;
};

struct ElectronProtonParams {
  double distance_angstrom = 5.0;
  std::vector<double> offsets_mt{0.0, 0.5, 1.0, 2.0};  // |B0 - Bmin|
  bool full_tensor = false;
};

struct ScanParams {
  std::vector<double> densities{0.001, 0.003, 0.01};
  std::vector<double> sigmas{0.0, 0.003, 0.016};
  std::size_t n_min = 3;
  std::size_t n_max = 8;
  std::size_t n_sites = 7000;  // uniformity cell size
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::DensityScan;
  std::string output_dir = ".";
  PhysicsInput physics;
  ensemble::EnsembleSpec spec;  // params/coupling derived from physics
  std::optional<unsigned> threads;  // unset: resolved from env or 1
  TwoSpinParams two_spin;
  FieldSweepParams field_sweep;
  ElectronProtonParams electron_proton;
  ScanParams scan;
};

// Parse and validate. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

void validate(const ExperimentConfig& cfg);

// Full dump including defaults, in boundary units (GHz, MHz, mT, us).
// parse_config(resolved_json(cfg)) reproduces cfg.
nlohmann::json resolved_json(const ExperimentConfig& cfg);

}  // namespace ctspin::config
