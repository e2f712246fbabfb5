#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctspin/echo.hpp"
#include "ctspin/ensemble.hpp"
#include "ctspin/lattice.hpp"

// Artifact emission: CSV series/tables, JSON envelopes and manifests,
// and a versioned lattice interchange format.
namespace ctspin::io {

// shortest round-trip decimal form, identical across reruns
std::string format_double(double v);

void write_text(const std::string& path, const std::string& text);

std::string coherence_csv(const echo::CoherenceSeries& series);
void write_coherence_csv(const std::string& path,
                         const echo::CoherenceSeries& series);

// series plus its metadata in one JSON document
nlohmann::json series_envelope(const echo::CoherenceSeries& series);

std::string nspin_table_csv(const std::vector<ensemble::NSpinRow>& rows);
std::string density_table_csv(const std::vector<ensemble::DensityRow>& rows);
std::string disorder_table_csv(const std::vector<ensemble::DisorderRow>& rows);
std::string uniformity_table_csv(const ensemble::UniformityResult& result);

inline constexpr int lattice_format_version = 1;

// cell vectors and site coordinates in angstrom, 3 decimals
nlohmann::json lattice_to_json(const lattice::SiteLattice& lat);
lattice::SiteLattice lattice_from_json(const nlohmann::json& j);
void write_lattice_json(const std::string& path,
                        const lattice::SiteLattice& lat);
lattice::SiteLattice read_lattice_json(const std::string& path);

struct RunManifest {
  nlohmann::json resolved_config;
  std::uint64_t seed = 0;
  std::string version;
  double wall_seconds = 0.0;
  std::size_t accepted = 0;
  std::size_t attempted = 0;
  std::vector<std::string> outputs;
  std::string status = "ok";  // "ok" | "failed"
  std::string error;          // set when status == "failed"
  nlohmann::json extra;       // experiment-specific summary numbers
};

nlohmann::json manifest_json(const RunManifest& manifest);
void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace ctspin::io
