#include "ctspin/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "ctspin/errors.hpp"
#include "ctspin/fitting.hpp"
#include "ctspin/hamiltonian.hpp"
#include "ctspin/oracle.hpp"
#include "ctspin/units.hpp"
#include "ctspin/version.hpp"

namespace ctspin::experiments {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Emitter {
  fs::path dir;
  std::vector<std::string> outputs;

  void text(const std::string& name, const std::string& body) {
    io::write_text((dir / name).string(), body);
    outputs.push_back(name);
  }
  void json_doc(const std::string& name, const json& j) {
    text(name, j.dump(2) + "\n");
  }
};

json fit_to_json(const fitting::FitResult& fit) {
  json j;
  j["t2_us"] = fit.t2;
  j["beta"] = fit.beta;
  j["sse"] = fit.sse;
  j["converged"] = fit.converged;
  return j;
}

lattice::SpinConfiguration two_site_configuration(double separation) {
  lattice::SpinConfiguration config;
  config.positions = {Eigen::Vector3d::Zero(),
                      Eigen::Vector3d(0.0, 0.0, separation)};
  config.site_indices = {0, 1};
  config.center = Eigen::Vector3d::Zero();
  config.parent_extent = separation;
  return config;
}

void run_two_spin(const config::ExperimentConfig& cfg, Emitter& em,
                  io::RunManifest& manifest) {
  hamiltonian::CouplingModel coupling;
  coupling.scale = cfg.physics.coupling_scale;
  coupling.fixed_jzz = units::mhz(cfg.two_spin.j_mhz);

  // the gap mismatch is split symmetrically so the mean gap stays at E
  hamiltonian::GapAssignment gaps;
  const double half = 0.5 * units::mhz(cfg.two_spin.delta_mhz);
  gaps.gaps = {cfg.spec.params.e + half, cfg.spec.params.e - half};

  const auto config = two_site_configuration(10.0);
  const auto h = hamiltonian::build_projected_n_spin(config, cfg.spec.params,
                                                     gaps, coupling);
  const auto protocol = echo::EchoProtocol::over_two_tau(
      cfg.spec.two_tau_max, cfg.spec.grid_points);
  auto series = echo::hahn_echo(h, protocol, 0);
  series.meta["experiment"] = "two-spin";
  series.meta["j_mhz"] = io::format_double(cfg.two_spin.j_mhz);
  series.meta["delta_mhz"] = io::format_double(cfg.two_spin.delta_mhz);

  em.text("series.csv", io::coherence_csv(series));
  em.json_doc("series.json", io::series_envelope(series));

  json summary;
  const auto law = oracle::amplitude_frequency(
      units::mhz(cfg.two_spin.j_mhz), units::mhz(cfg.two_spin.delta_mhz));
  summary["predicted_amplitude"] = law.amplitude;
  summary["predicted_omega_rad_per_us"] = law.omega;
  try {
    const auto fit = fitting::fit_cosine_offset(series.two_tau, series.values);
    summary["fit_amplitude"] = fit.amplitude;
    summary["fit_omega_rad_per_us"] = fit.omega;
    summary["fit_offset"] = fit.offset;
  } catch (const EngineError& e) {
    summary["fit_error"] = e.what();
  }
  manifest.extra = summary;
  manifest.accepted = manifest.attempted = 1;
}

void run_field_sweep(const config::ExperimentConfig& cfg, Emitter& em,
                     io::RunManifest& manifest) {
  const auto& sweep = cfg.field_sweep;
  std::ostringstream os;
  os << "b0_mt,full_lower_ghz,full_middle_ghz,full_upper_ghz,"
        "qubit_lower_ghz,qubit_upper_ghz\n";
  for (std::size_t i = 0; i < sweep.points; ++i) {
    hamiltonian::QubitParams p = cfg.spec.params;
    p.b0_mt = p.bmin_mt - sweep.span_mt +
              2.0 * sweep.span_mt * static_cast<double>(i) /
                  static_cast<double>(sweep.points - 1);
    const auto full = hamiltonian::build_single_s1(p);
    const Eigen::Matrix2cd q = hamiltonian::project_qubit(p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> qs(q);
    os << io::format_double(p.b0_mt);
    for (int k = 0; k < 3; ++k)
      os << ',' << io::format_double(units::to_ghz(full.eigenvalues[k]));
    for (int k = 0; k < 2; ++k)
      os << ',' << io::format_double(units::to_ghz(qs.eigenvalues()(k)));
    os << '\n';
  }
  em.text("levels.csv", os.str());
  manifest.accepted = manifest.attempted = sweep.points;
}

void run_electron_proton(const config::ExperimentConfig& cfg, Emitter& em,
                         io::RunManifest& manifest) {
  const auto& ep = cfg.electron_proton;
  const auto protocol = echo::EchoProtocol::over_two_tau(
      cfg.spec.two_tau_max, cfg.spec.grid_points,
      echo::PulseTargets::ElectronOnly);

  std::ostringstream table;
  table << "offset_mt,modulation_amplitude\n";
  json amplitudes = json::array();
  for (std::size_t i = 0; i < ep.offsets_mt.size(); ++i) {
    hamiltonian::QubitParams p = cfg.spec.params;
    p.b0_mt = p.bmin_mt + ep.offsets_mt[i];
    const auto h = hamiltonian::build_electron_proton(
        p, Eigen::Vector3d(0.0, 0.0, ep.distance_angstrom), ep.full_tensor);
    auto series = echo::hahn_echo(h, protocol, 0);
    series.meta["offset_mt"] = io::format_double(ep.offsets_mt[i]);
    const auto [lo, hi] = std::minmax_element(series.values.begin(),
                                              series.values.end());
    const double amplitude = *hi - *lo;
    table << io::format_double(ep.offsets_mt[i]) << ','
          << io::format_double(amplitude) << '\n';
    amplitudes.push_back(amplitude);
    em.text("echo_offset_" + std::to_string(i) + ".csv",
            io::coherence_csv(series));
  }
  em.text("modulation.csv", table.str());
  json summary;
  summary["offsets_mt"] = ep.offsets_mt;
  summary["modulation_amplitudes"] = amplitudes;
  manifest.extra = summary;
  manifest.accepted = manifest.attempted = ep.offsets_mt.size();
}

void run_nspin(const config::ExperimentConfig& cfg, Emitter& em,
               io::RunManifest& manifest) {
  const auto scan = ensemble::convergence_scan_nspins(
      cfg.scan.n_min, cfg.scan.n_max, cfg.spec);
  em.text("nspin_scan.csv", io::nspin_table_csv(scan.rows));
  json summary;
  for (const auto& row : scan.rows) {
    json r;
    r["n_spins"] = row.n_spins;
    r["n_sites"] = row.n_sites;
    r["fit"] = fit_to_json(row.fit);
    summary.push_back(r);
  }
  manifest.extra = json{{"rows", summary}};
  manifest.accepted = scan.accepted;
  manifest.attempted = scan.attempted;
}

void run_density(const config::ExperimentConfig& cfg, Emitter& em,
                 io::RunManifest& manifest) {
  const auto rows = ensemble::density_scan(cfg.scan.densities, cfg.spec);
  em.text("density_scan.csv", io::density_table_csv(rows));
  manifest.accepted = manifest.attempted = 0;
  std::vector<double> log_x, log_t2;
  for (const auto& r : rows) {
    manifest.accepted += r.accepted;
    manifest.attempted += r.attempted;
    if (r.fit.t2 > 0.0) {
      log_x.push_back(std::log(r.density));
      log_t2.push_back(std::log(r.fit.t2));
    }
  }
  json summary;
  if (log_x.size() >= 2) {
    const auto line = fitting::fit_linear(log_x, log_t2);
    summary["loglog_slope"] = line.slope;
    summary["loglog_intercept"] = line.intercept;
    summary["loglog_r2"] = line.r2;
  }
  manifest.extra = summary;
}

void run_disorder(const config::ExperimentConfig& cfg, Emitter& em,
                  io::RunManifest& manifest) {
  const auto rows = ensemble::disorder_scan(cfg.scan.sigmas, cfg.spec);
  em.text("disorder_scan.csv", io::disorder_table_csv(rows));
  manifest.accepted = manifest.attempted = 0;
  json summary = json::array();
  for (const auto& r : rows) {
    manifest.accepted += r.accepted;
    manifest.attempted += r.attempted;
    json row;
    row["sigma"] = r.sigma;
    row["fit"] = fit_to_json(r.fit);
    summary.push_back(row);
  }
  manifest.extra = json{{"rows", summary}};
}

void run_uniformity(const config::ExperimentConfig& cfg, Emitter& em,
                    io::RunManifest& manifest) {
  const auto result = ensemble::uniformity_experiment(
      cfg.scan.n_sites, 7, cfg.spec.n_configs, cfg.spec);
  em.text("uniformity.csv", io::uniformity_table_csv(result));
  em.text("random_mean.csv", io::coherence_csv(result.random_mean));
  em.text("uniform_mean.csv", io::coherence_csv(result.uniform_mean));
  json summary;
  summary["random_fit"] = fit_to_json(result.random_fit);
  summary["uniform_fit"] = fit_to_json(result.uniform_fit);
  summary["t2_ratio"] = result.uniform_fit.t2 / result.random_fit.t2;
  manifest.extra = summary;
  manifest.accepted = manifest.attempted = 2 * cfg.spec.n_configs;
}

}  // namespace

io::RunManifest run_experiment(const config::ExperimentConfig& cfg) {
  config::validate(cfg);

  Emitter em;
  em.dir = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(em.dir, ec);
  if (ec && !fs::is_directory(em.dir))
    throw EngineError("cannot create output directory: " + em.dir.string());

  io::RunManifest manifest;
  manifest.resolved_config = config::resolved_json(cfg);
  manifest.seed = cfg.spec.master_seed;
  manifest.version = version_string;

  config::ExperimentConfig run_cfg = cfg;
  if (cfg.threads) run_cfg.spec.threads = *cfg.threads;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (run_cfg.kind) {
      case config::ExperimentKind::TwoSpin:
        run_two_spin(run_cfg, em, manifest);
        break;
      case config::ExperimentKind::FieldSweep:
        run_field_sweep(run_cfg, em, manifest);
        break;
      case config::ExperimentKind::ElectronProton:
        run_electron_proton(run_cfg, em, manifest);
        break;
      case config::ExperimentKind::NSpinConvergence:
        run_nspin(run_cfg, em, manifest);
        break;
      case config::ExperimentKind::DensityScan:
      case config::ExperimentKind::CceDensity:
        run_density(run_cfg, em, manifest);
        break;
      case config::ExperimentKind::DisorderScan:
      case config::ExperimentKind::CceDisorder:
        run_disorder(run_cfg, em, manifest);
        break;
      case config::ExperimentKind::Uniformity:
        run_uniformity(run_cfg, em, manifest);
        break;
    }
  } catch (const std::exception& e) {
    manifest.status = "failed";
    manifest.error = e.what();
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    manifest.outputs = em.outputs;
    io::write_manifest((em.dir / "manifest.json").string(), manifest);
    throw;
  }

  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.outputs = em.outputs;
  manifest.outputs.push_back("manifest.json");
  io::write_manifest((em.dir / "manifest.json").string(), manifest);
  return manifest;
}

}  // namespace ctspin::experiments
