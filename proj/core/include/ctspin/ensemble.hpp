#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctspin/cce.hpp"
#include "ctspin/echo.hpp"
#include "ctspin/fitting.hpp"
#include "ctspin/hamiltonian.hpp"
#include "ctspin/lattice.hpp"
#include "ctspin/rng.hpp"

// Monte Carlo orchestration: samples spin configurations and gap
// disorder, runs the echo engine (or the cluster expansion) per
// configuration, averages, and fits.  Results are a pure function of the
// spec including the master seed, for any worker count.
namespace ctspin::ensemble {

enum class Engine { Exact, Cce };

struct EnsembleSpec {
  double density = 0.001;
  std::size_t n_spins = 6;
  std::size_t n_configs = 200;
  lattice::Geometry geometry = lattice::Geometry::Sphere;
  double gap_std_fraction = 0.0;  // sigma as a fraction of E
  Engine engine = Engine::Exact;
  cce::CceConfig cce;
  std::uint64_t master_seed = 1;
  double two_tau_max = 10.0;
  std::size_t grid_points = 501;
  std::optional<double> fit_max_2tau;
  unsigned threads = 1;
  bool retain_series = false;
  hamiltonian::QubitParams params;
  hamiltonian::CouplingModel coupling;
};

void validate(const EnsembleSpec& spec);

struct EnsembleResult {
  echo::CoherenceSeries mean;
  std::vector<echo::CoherenceSeries> per_config;  // retain_series only
  std::size_t accepted = 0;
  std::size_t attempted = 0;
  fitting::FitResult fit;
};

// Central gap pinned to e; bath gaps drawn from N(e, sigma_fraction*e)
// with negative draws rejected.
hamiltonian::GapAssignment sample_gaps(double e, double sigma_fraction,
                                       std::size_t n_spins,
                                       rng::Stream& stream);

EnsembleResult run_ensemble(const EnsembleSpec& spec);

// Same run against a caller-provided lattice (must match the geometry).
EnsembleResult run_ensemble(const EnsembleSpec& spec,
                            const lattice::SiteLattice& lat);

struct NSpinRow {
  std::size_t n_spins = 0;
  std::size_t n_sites = 0;
  fitting::FitResult fit;
};

struct NSpinScan {
  std::vector<NSpinRow> rows;
  std::size_t accepted = 0;   // shared by every row (paired ensembles)
  std::size_t attempted = 0;
};

// Grows each sampled configuration one spin at a time (keeping earlier
// positions) across spheres sized ceil(N/x), so the per-N ensembles are
// paired.
NSpinScan convergence_scan_nspins(std::size_t n_min, std::size_t n_max,
                                  const EnsembleSpec& spec);

struct DensityRow {
  double density = 0.0;
  double radius = 0.0;
  std::size_t n_sites = 0;
  fitting::FitResult fit;
  std::size_t accepted = 0;
  std::size_t attempted = 0;
};

std::vector<DensityRow> density_scan(const std::vector<double>& densities,
                                     const EnsembleSpec& spec);

struct DisorderRow {
  double sigma = 0.0;
  fitting::FitResult fit;
  std::size_t accepted = 0;
  std::size_t attempted = 0;
};

std::vector<DisorderRow> disorder_scan(const std::vector<double>& sigmas,
                                       const EnsembleSpec& spec);

struct UniformityResult {
  fitting::FitResult random_fit;
  fitting::FitResult uniform_fit;
  echo::CoherenceSeries random_mean;
  echo::CoherenceSeries uniform_mean;
};

// Random sphere placement vs one spin per outer cube region, both
// averaged over n_configs; reports both fits.
UniformityResult uniformity_experiment(std::size_t n_sites,
                                       std::size_t n_spins,
                                       std::size_t n_configs,
                                       const EnsembleSpec& spec);

}  // namespace ctspin::ensemble
