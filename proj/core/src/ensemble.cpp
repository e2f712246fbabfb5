#include "ctspin/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "ctspin/errors.hpp"

namespace ctspin::ensemble {

namespace {

constexpr std::size_t abort_factor = 1000;

std::size_t site_target(double density, std::size_t n_spins) {
  return static_cast<std::size_t>(
      std::ceil(static_cast<double>(n_spins) / density));
}

// One Monte Carlo work item: either a set of coherence series (one per
// variant) or a discard.
using WorkerResult = std::optional<std::vector<std::vector<double>>>;
using Worker = std::function<WorkerResult(std::size_t)>;

struct McOutcome {
  std::vector<std::vector<double>> means;
  std::vector<std::size_t> accepted_ks;
  std::size_t attempted = 0;
  std::vector<std::vector<double>> retained;  // variant 0, accepted order
};

// Deterministic indexed Monte Carlo: configuration k always sees the
// same derived streams, acceptance is decided in index order, and the
// mean is accumulated in index order, so the outcome does not depend on
// the worker count or scheduling.
McOutcome run_indexed_mc(std::size_t n_target, unsigned threads,
                         std::size_t n_variants, bool retain,
                         const Worker& worker) {
  if (n_target < 1) throw ConfigError("target configuration count must be >= 1");

  std::mutex mu;
  std::map<std::size_t, WorkerResult> done;
  std::vector<std::size_t> accepted;
  std::size_t prefix = 0;  // smallest index not yet recorded
  std::atomic<bool> stop{false};
  bool aborted = false;
  std::exception_ptr failure;
  std::atomic<std::size_t> next{0};

  auto record = [&](std::size_t k, WorkerResult&& res) {
    std::lock_guard<std::mutex> lock(mu);
    done.emplace(k, std::move(res));
    for (auto it = done.find(prefix); it != done.end();
         it = done.find(++prefix)) {
      if (it->second.has_value() && accepted.size() < n_target)
        accepted.push_back(prefix);
    }
    if (accepted.size() >= n_target) stop.store(true);
    if (done.size() > abort_factor * n_target &&
        accepted.size() < n_target) {
      aborted = true;
      stop.store(true);
    }
  };

  auto body = [&]() {
    while (!stop.load()) {
      const std::size_t k = next.fetch_add(1);
      WorkerResult res;
      try {
        res = worker(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        stop.store(true);
        return;
      }
      record(k, std::move(res));
    }
  };

  const unsigned n_threads = std::max(1u, threads);
  if (n_threads == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }

  if (failure) std::rethrow_exception(failure);
  if (aborted || accepted.size() < n_target) {
    std::ostringstream os;
    os << "acceptance target unreachable: " << accepted.size() << " of "
       << n_target << " configurations accepted after " << done.size()
       << " attempts (divergent cluster expansions discarded)";
    throw EngineError(os.str());
  }

  McOutcome out;
  out.accepted_ks = accepted;
  out.attempted = accepted.back() + 1;
  for (std::size_t v = 0; v < n_variants; ++v) {
    const auto& first = *done.at(accepted.front());
    std::vector<double> mean(first[v].size(), 0.0);
    for (std::size_t k : accepted) {
      const auto& series = (*done.at(k))[v];
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += series[i];
    }
    for (double& m : mean) m /= static_cast<double>(n_target);
    out.means.push_back(std::move(mean));
  }
  if (retain)
    for (std::size_t k : accepted) out.retained.push_back((*done.at(k))[0]);
  return out;
}

echo::CoherenceSeries make_series(const echo::EchoProtocol& protocol,
                                  std::vector<double> values) {
  echo::CoherenceSeries s;
  s.two_tau.reserve(protocol.tau_grid.size());
  for (double tau : protocol.tau_grid) s.two_tau.push_back(2.0 * tau);
  s.values = std::move(values);
  return s;
}

void annotate(echo::CoherenceSeries& s, const EnsembleSpec& spec) {
  s.meta["seed"] = std::to_string(spec.master_seed);
  s.meta["n_spins"] = std::to_string(spec.n_spins);
  s.meta["density"] = std::to_string(spec.density);
  s.meta["gap_std_fraction"] = std::to_string(spec.gap_std_fraction);
  s.meta["geometry"] =
      spec.geometry == lattice::Geometry::Sphere ? "sphere" : "cube";
  s.meta["engine"] = spec.engine == Engine::Exact ? "exact" : "cce";
}

lattice::SiteLattice build_spec_lattice(const EnsembleSpec& spec) {
  const auto cell = lattice::default_unit_cell();
  if (spec.geometry == lattice::Geometry::DissectedCube)
    return lattice::build_dissected_cube(
        cell, site_target(spec.density, spec.n_spins));
  // Calibrated radii realize the standard 6-spin scans; everything else
  // cuts the sphere by site count.
  if (spec.n_spins == 6) {
    if (const auto r = lattice::calibrated_radius(spec.density))
      return lattice::generate_sphere_sites(cell, *r);
  }
  return lattice::sphere_with_site_count(
      cell, site_target(spec.density, spec.n_spins));
}

}  // namespace

void validate(const EnsembleSpec& spec) {
  if (!(spec.density > 0.0) || spec.density > 1.0)
    throw ConfigError("density must lie in (0, 1]");
  if (spec.n_spins < 1) throw ConfigError("n_spins must be >= 1");
  if (spec.n_configs < 1) throw ConfigError("n_configs must be >= 1");
  if (spec.gap_std_fraction < 0.0)
    throw ConfigError("gap_std_fraction must be non-negative");
  if (spec.grid_points < 2) throw ConfigError("grid needs at least 2 points");
  if (!(spec.two_tau_max > 0.0))
    throw ConfigError("two_tau_max must be positive");
  if (spec.geometry == lattice::Geometry::DissectedCube && spec.n_spins != 7)
    throw ConfigError("dissected-cube ensembles place exactly 7 spins");
  if (spec.engine == Engine::Cce) {
    cce::validate(spec.cce);
    if (static_cast<std::size_t>(spec.cce.max_order) + 1 > spec.n_spins)
      throw ConfigError("cce max_order exceeds the bath size");
  }
  if (spec.fit_max_2tau && !(*spec.fit_max_2tau > 0.0))
    throw ConfigError("fit_max_2tau must be positive");
}

hamiltonian::GapAssignment sample_gaps(double e, double sigma_fraction,
                                       std::size_t n_spins,
                                       rng::Stream& stream) {
  if (sigma_fraction < 0.0)
    throw ConfigError("gap_std_fraction must be non-negative");
  hamiltonian::GapAssignment gaps;
  gaps.gaps.reserve(n_spins);
  gaps.gaps.push_back(e);  // central gap pinned
  for (std::size_t i = 1; i < n_spins; ++i) {
    if (sigma_fraction == 0.0) {
      gaps.gaps.push_back(e);
      continue;
    }
    double g = stream.normal(e, sigma_fraction * e);
    while (g <= 0.0) g = stream.normal(e, sigma_fraction * e);
    gaps.gaps.push_back(g);
  }
  return gaps;
}

EnsembleResult run_ensemble(const EnsembleSpec& spec) {
  validate(spec);
  return run_ensemble(spec, build_spec_lattice(spec));
}

EnsembleResult run_ensemble(const EnsembleSpec& spec,
                            const lattice::SiteLattice& lat) {
  validate(spec);
  if (lat.geometry != spec.geometry)
    throw ConfigError("lattice geometry does not match the ensemble spec");

  const auto protocol =
      echo::EchoProtocol::over_two_tau(spec.two_tau_max, spec.grid_points);

  Worker worker = [&spec, &lat, &protocol](std::size_t k) -> WorkerResult {
    const char* sites_tag =
        spec.geometry == lattice::Geometry::Sphere ? "sites" : "uniform-sites";
    rng::Stream site_stream(
        rng::derive_seed(spec.master_seed, k, sites_tag));
    const lattice::SpinConfiguration config =
        spec.geometry == lattice::Geometry::Sphere
            ? lattice::sample_configuration(lat, spec.n_spins, site_stream)
            : lattice::sample_uniform_configuration(lat, site_stream);

    rng::Stream gap_stream(rng::derive_seed(spec.master_seed, k, "gaps"));
    const auto gaps = sample_gaps(spec.params.e, spec.gap_std_fraction,
                                  config.size(), gap_stream);

    if (spec.engine == Engine::Exact) {
      const auto h = hamiltonian::build_projected_n_spin(config, spec.params,
                                                         gaps, spec.coupling);
      return std::vector<std::vector<double>>{
          echo::hahn_echo(h, protocol, 0).values};
    }
    auto res = cce::compute_cce(config, spec.params, gaps, protocol,
                                spec.cce, spec.coupling);
    if (!res.valid) return std::nullopt;
    return std::vector<std::vector<double>>{std::move(res.series.values)};
  };

  McOutcome mc = run_indexed_mc(spec.n_configs, spec.threads, 1,
                                spec.retain_series, worker);

  EnsembleResult result;
  result.mean = make_series(protocol, std::move(mc.means[0]));
  annotate(result.mean, spec);
  result.accepted = spec.n_configs;
  result.attempted = mc.attempted;
  if (spec.retain_series)
    for (auto& v : mc.retained)
      result.per_config.push_back(make_series(protocol, std::move(v)));
  result.fit = fitting::fit_stretched_exponential(
      result.mean.two_tau, result.mean.values, spec.fit_max_2tau);
  return result;
}

NSpinScan convergence_scan_nspins(std::size_t n_min, std::size_t n_max,
                                  const EnsembleSpec& spec) {
  validate(spec);
  if (n_min < 1 || n_min > n_max)
    throw ConfigError("invalid spin-count range");
  if (spec.geometry != lattice::Geometry::Sphere)
    throw ConfigError("the spin-count scan runs on spherical cells");

  const auto cell = lattice::default_unit_cell();
  std::vector<lattice::SiteLattice> lats;
  for (std::size_t n = n_min; n <= n_max; ++n)
    lats.push_back(lattice::sphere_with_site_count(
        cell, site_target(spec.density, n)));

  const auto protocol =
      echo::EchoProtocol::over_two_tau(spec.two_tau_max, spec.grid_points);
  const std::size_t n_variants = n_max - n_min + 1;

  Worker worker = [&](std::size_t k) -> WorkerResult {
    rng::Stream site_stream(rng::derive_seed(spec.master_seed, k, "sites"));
    rng::Stream gap_stream(rng::derive_seed(spec.master_seed, k, "gaps"));
    // one draw per bath spin, shared across the growing configurations
    std::vector<double> bath_gaps;
    for (std::size_t i = 1; i < n_max; ++i) {
      if (spec.gap_std_fraction == 0.0) {
        bath_gaps.push_back(spec.params.e);
      } else {
        double g = gap_stream.normal(spec.params.e,
                                     spec.gap_std_fraction * spec.params.e);
        while (g <= 0.0)
          g = gap_stream.normal(spec.params.e,
                                spec.gap_std_fraction * spec.params.e);
        bath_gaps.push_back(g);
      }
    }

    std::vector<std::vector<double>> series;
    series.reserve(n_variants);
    lattice::SpinConfiguration config =
        lattice::sample_configuration(lats[0], n_min, site_stream);
    for (std::size_t n = n_min; n <= n_max; ++n) {
      if (n > n_min)
        config = lattice::extend_configuration(config, lats[n - n_min],
                                               site_stream);
      hamiltonian::GapAssignment gaps;
      gaps.gaps.push_back(spec.params.e);
      for (std::size_t i = 1; i < n; ++i)
        gaps.gaps.push_back(bath_gaps[i - 1]);

      if (spec.engine == Engine::Exact) {
        const auto h = hamiltonian::build_projected_n_spin(
            config, spec.params, gaps, spec.coupling);
        series.push_back(echo::hahn_echo(h, protocol, 0).values);
      } else {
        auto res = cce::compute_cce(config, spec.params, gaps, protocol,
                                    spec.cce, spec.coupling);
        if (!res.valid) return std::nullopt;  // discard k for every N
        series.push_back(std::move(res.series.values));
      }
    }
    return series;
  };

  McOutcome mc = run_indexed_mc(spec.n_configs, spec.threads, n_variants,
                                false, worker);

  NSpinScan scan;
  scan.accepted = spec.n_configs;
  scan.attempted = mc.attempted;
  for (std::size_t v = 0; v < n_variants; ++v) {
    NSpinRow row;
    row.n_spins = n_min + v;
    row.n_sites = lats[v].size();
    auto series = make_series(protocol, std::move(mc.means[v]));
    row.fit = fitting::fit_stretched_exponential(series.two_tau,
                                                 series.values,
                                                 spec.fit_max_2tau);
    scan.rows.push_back(row);
  }
  return scan;
}

std::vector<DensityRow> density_scan(const std::vector<double>& densities,
                                     const EnsembleSpec& spec) {
  if (densities.empty()) throw ConfigError("density scan needs at least one x");
  std::vector<DensityRow> rows;
  for (double x : densities) {
    EnsembleSpec point = spec;
    point.density = x;
    validate(point);
    const auto lat = build_spec_lattice(point);
    const auto result = run_ensemble(point, lat);
    DensityRow row;
    row.density = x;
    row.radius = lat.extent;
    row.n_sites = lat.size();
    row.fit = result.fit;
    row.accepted = result.accepted;
    row.attempted = result.attempted;
    rows.push_back(row);
  }
  return rows;
}

std::vector<DisorderRow> disorder_scan(const std::vector<double>& sigmas,
                                       const EnsembleSpec& spec) {
  if (sigmas.empty()) throw ConfigError("disorder scan needs at least one sigma");
  validate(spec);
  const auto lat = build_spec_lattice(spec);
  std::vector<DisorderRow> rows;
  for (double sigma : sigmas) {
    EnsembleSpec point = spec;
    point.gap_std_fraction = sigma;
    const auto result = run_ensemble(point, lat);
    DisorderRow row;
    row.sigma = sigma;
    row.fit = result.fit;
    row.accepted = result.accepted;
    row.attempted = result.attempted;
    rows.push_back(row);
  }
  return rows;
}

UniformityResult uniformity_experiment(std::size_t n_sites,
                                       std::size_t n_spins,
                                       std::size_t n_configs,
                                       const EnsembleSpec& spec) {
  if (n_spins != 7)
    throw ConfigError("the uniformity comparison places exactly 7 spins");
  const auto cell = lattice::default_unit_cell();
  const auto sphere = lattice::sphere_with_site_count(cell, n_sites);
  const auto cube = lattice::build_dissected_cube(cell, n_sites);

  EnsembleSpec random_spec = spec;
  random_spec.geometry = lattice::Geometry::Sphere;
  random_spec.n_spins = n_spins;
  random_spec.n_configs = n_configs;
  random_spec.density =
      static_cast<double>(n_spins) / static_cast<double>(n_sites);

  EnsembleSpec uniform_spec = random_spec;
  uniform_spec.geometry = lattice::Geometry::DissectedCube;

  const auto random_result = run_ensemble(random_spec, sphere);
  const auto uniform_result = run_ensemble(uniform_spec, cube);

  UniformityResult out;
  out.random_fit = random_result.fit;
  out.uniform_fit = uniform_result.fit;
  out.random_mean = random_result.mean;
  out.uniform_mean = uniform_result.mean;
  return out;
}

}  // namespace ctspin::ensemble
