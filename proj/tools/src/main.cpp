// ctspin command line front end: run experiment configs, validate them,
// or launch parameter scans with flag overrides.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ctspin/config.hpp"
#include "ctspin/errors.hpp"
#include "ctspin/experiments.hpp"
#include "ctspin/version.hpp"

namespace {

using ctspin::ConfigError;

struct Overrides {
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::string> geometry;
  std::optional<std::string> engine;
  std::optional<std::size_t> cce_order;
  std::optional<double> r_bath;
  std::optional<double> r_dipole;
  std::optional<double> divergence_threshold;
  std::optional<double> fit_max_2tau;
  std::optional<double> two_tau_max;
  std::optional<std::size_t> grid_points;
  std::optional<std::size_t> n_configs;
  std::optional<std::size_t> n_spins;
  std::optional<std::size_t> n_sites;
  std::optional<double> density;
  std::optional<double> gap_std;
  std::vector<double> densities;
  std::vector<double> sigmas;
  std::optional<std::size_t> n_min;
  std::optional<std::size_t> n_max;
};

void add_override_flags(CLI::App* cmd, Overrides& o, bool scan_lists) {
  cmd->add_option("--threads", o.threads,
                  "worker thread count (default: config, then the "
                  "CTSPIN_THREADS environment variable, then 1)");
  cmd->add_option("--seed", o.seed, "master seed for the random streams");
  cmd->add_option("--output-dir", o.output_dir,
                  "directory for CSV and manifest artifacts");
  cmd->add_option("--geometry", o.geometry,
                  "site cell shape: sphere or cube")
      ->check(CLI::IsMember({"sphere", "cube"}));
  cmd->add_option("--engine", o.engine,
                  "coherence engine: exact or cce")
      ->check(CLI::IsMember({"exact", "cce"}));
  cmd->add_option("--cce-order", o.cce_order,
                  "largest cluster size in the cluster expansion");
  cmd->add_option("--r-bath", o.r_bath,
                  "bath cutoff radius around the central spin (angstrom)");
  cmd->add_option("--r-dipole", o.r_dipole,
                  "cluster adjacency radius (angstrom)");
  cmd->add_option("--divergence-threshold", o.divergence_threshold,
                  "discard a configuration when any cluster contribution "
                  "exceeds this magnitude");
  cmd->add_option("--fit-max-2tau", o.fit_max_2tau,
                  "truncate the decay fit window at this 2*tau (us)");
  cmd->add_option("--two-tau-max", o.two_tau_max,
                  "echo series extends over 2*tau in [0, this] (us)");
  cmd->add_option("--grid-points", o.grid_points,
                  "number of points on the echo time grid");
  cmd->add_option("--configs", o.n_configs,
                  "target count of accepted random configurations");
  cmd->add_option("--n-spins", o.n_spins, "spins per configuration");
  cmd->add_option("--density", o.density,
                  "occupied fraction of host sites");
  cmd->add_option("--gap-std", o.gap_std,
                  "bath gap spread as a fraction of the qubit gap");
  if (scan_lists) {
    cmd->add_option("--densities", o.densities,
                    "density grid for density scans")
        ->delimiter(',');
    cmd->add_option("--sigmas", o.sigmas,
                    "gap-spread grid for disorder scans")
        ->delimiter(',');
    cmd->add_option("--n-min", o.n_min, "smallest spin count in the scan");
    cmd->add_option("--n-max", o.n_max, "largest spin count in the scan");
    cmd->add_option("--n-sites", o.n_sites,
                    "cell size for the uniformity comparison");
  }
}

unsigned threads_from_env() {
  const char* env = std::getenv("CTSPIN_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1)
    throw ConfigError("CTSPIN_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

void apply_overrides(ctspin::config::ExperimentConfig& cfg,
                     const Overrides& o) {
  if (o.seed) cfg.spec.master_seed = *o.seed;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.geometry)
    cfg.spec.geometry = *o.geometry == "sphere"
                            ? ctspin::lattice::Geometry::Sphere
                            : ctspin::lattice::Geometry::DissectedCube;
  if (o.engine)
    cfg.spec.engine = *o.engine == "exact" ? ctspin::ensemble::Engine::Exact
                                           : ctspin::ensemble::Engine::Cce;
  if (o.cce_order) cfg.spec.cce.max_order = static_cast<int>(*o.cce_order);
  if (o.r_bath) cfg.spec.cce.r_bath = *o.r_bath;
  if (o.r_dipole) cfg.spec.cce.r_dipole = *o.r_dipole;
  if (o.divergence_threshold)
    cfg.spec.cce.divergence_threshold = *o.divergence_threshold;
  if (o.fit_max_2tau) cfg.spec.fit_max_2tau = *o.fit_max_2tau;
  if (o.two_tau_max) cfg.spec.two_tau_max = *o.two_tau_max;
  if (o.grid_points) cfg.spec.grid_points = *o.grid_points;
  if (o.n_configs) cfg.spec.n_configs = *o.n_configs;
  if (o.n_spins) cfg.spec.n_spins = *o.n_spins;
  if (o.density) cfg.spec.density = *o.density;
  if (o.gap_std) cfg.spec.gap_std_fraction = *o.gap_std;
  if (!o.densities.empty()) cfg.scan.densities = o.densities;
  if (!o.sigmas.empty()) cfg.scan.sigmas = o.sigmas;
  if (o.n_min) cfg.scan.n_min = *o.n_min;
  if (o.n_max) cfg.scan.n_max = *o.n_max;
  if (o.n_sites) cfg.scan.n_sites = *o.n_sites;

  // cce-* kinds always run on the cluster-expansion engine
  if (cfg.kind == ctspin::config::ExperimentKind::CceDensity ||
      cfg.kind == ctspin::config::ExperimentKind::CceDisorder)
    cfg.spec.engine = ctspin::ensemble::Engine::Cce;

  // precedence: flag, then config file, then environment
  if (o.threads)
    cfg.threads = *o.threads;
  else if (!cfg.threads)
    cfg.threads = threads_from_env();

  ctspin::config::validate(cfg);
}

int do_run(ctspin::config::ExperimentConfig cfg, const Overrides& o) {
  apply_overrides(cfg, o);
  const auto manifest = ctspin::experiments::run_experiment(cfg);
  std::cout << "wrote " << manifest.outputs.size() << " artifacts to "
            << cfg.output_dir << " (accepted " << manifest.accepted << "/"
            << manifest.attempted << ", " << manifest.wall_seconds << " s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ctspin: Hahn-echo decoherence of a clock-transition spin qubit "
      "coupled to a dipolar spin bath"};
  app.set_version_flag("--version", ctspin::version_string);
  app.require_subcommand(1);

  std::string config_path;
  std::string scan_kind;
  Overrides run_overrides, scan_overrides;

  CLI::App* run = app.add_subcommand(
      "run", "execute an experiment config and write its artifacts");
  run->add_option("config", config_path, "JSON experiment config")
      ->required();
  add_override_flags(run, run_overrides, true);

  CLI::App* validate = app.add_subcommand(
      "validate",
      "check a config without running it and print the resolved values");
  validate->add_option("config", config_path, "JSON experiment config")
      ->required();

  CLI::App* scan = app.add_subcommand(
      "scan", "run a parameter scan from built-in defaults, no config file");
  scan->add_option("--kind", scan_kind,
                   "one of: nspin-convergence, density-scan, disorder-scan, "
                   "uniformity, cce-density, cce-disorder")
      ->required();
  add_override_flags(scan, scan_overrides, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return do_run(ctspin::config::load_config(config_path), run_overrides);

    if (validate->parsed()) {
      const auto cfg = ctspin::config::load_config(config_path);
      std::cout << ctspin::config::resolved_json(cfg).dump(2) << "\n";
      return 0;
    }

    // scan
    ctspin::config::ExperimentConfig cfg;
    cfg.kind = ctspin::config::parse_kind(scan_kind);
    switch (cfg.kind) {
      case ctspin::config::ExperimentKind::NSpinConvergence:
      case ctspin::config::ExperimentKind::DensityScan:
      case ctspin::config::ExperimentKind::DisorderScan:
      case ctspin::config::ExperimentKind::Uniformity:
      case ctspin::config::ExperimentKind::CceDensity:
      case ctspin::config::ExperimentKind::CceDisorder:
        break;
      default:
        throw ConfigError("\"" + scan_kind +
                          "\" is not a scan; use \"ctspin run\" with a "
                          "config file instead");
    }
    if (cfg.kind == ctspin::config::ExperimentKind::CceDensity ||
        cfg.kind == ctspin::config::ExperimentKind::CceDisorder)
      cfg.spec.engine = ctspin::ensemble::Engine::Cce;
    cfg.output_dir = "ctspin-" + scan_kind;
    return do_run(cfg, scan_overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ctspin::EngineError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
