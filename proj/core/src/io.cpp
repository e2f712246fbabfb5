#include "ctspin/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctspin/errors.hpp"
#include "ctspin/version.hpp"

namespace ctspin::io {

namespace {

using nlohmann::json;

std::string three_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

json vec3_to_json(const Eigen::Vector3d& v, bool rounded) {
  json a = json::array();
  for (int i = 0; i < 3; ++i) {
    if (rounded)
      a.push_back(std::stod(three_decimals(v[i])));
    else
      a.push_back(v[i]);
  }
  return a;
}

Eigen::Vector3d vec3_from_json(const json& a, const std::string& what) {
  if (!a.is_array() || a.size() != 3)
    throw ConfigError(what + ": expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!a[static_cast<std::size_t>(i)].is_number())
      throw ConfigError(what + ": expected an array of 3 numbers");
    v[i] = a[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

void append_fit(std::ostringstream& os, const fitting::FitResult& fit) {
  os << format_double(fit.t2) << ',' << format_double(fit.beta) << ','
     << format_double(fit.sse);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EngineError("cannot open output file: " + path);
  out << text;
  if (!out) throw EngineError("failed writing output file: " + path);
}

std::string coherence_csv(const echo::CoherenceSeries& series) {
  std::ostringstream os;
  os << "two_tau_us,L\n";
  for (std::size_t i = 0; i < series.two_tau.size(); ++i)
    os << format_double(series.two_tau[i]) << ','
       << format_double(series.values[i]) << '\n';
  return os.str();
}

void write_coherence_csv(const std::string& path,
                         const echo::CoherenceSeries& series) {
  write_text(path, coherence_csv(series));
}

nlohmann::json series_envelope(const echo::CoherenceSeries& series) {
  json j;
  j["two_tau_us"] = series.two_tau;
  j["L"] = series.values;
  json meta = json::object();
  for (const auto& [k, v] : series.meta) meta[k] = v;
  j["meta"] = meta;
  return j;
}

std::string nspin_table_csv(const std::vector<ensemble::NSpinRow>& rows) {
  std::ostringstream os;
  os << "n_spins,n_sites,t2_us,beta,sse,converged\n";
  for (const auto& r : rows) {
    os << r.n_spins << ',' << r.n_sites << ',';
    append_fit(os, r.fit);
    os << ',' << (r.fit.converged ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string density_table_csv(const std::vector<ensemble::DensityRow>& rows) {
  std::ostringstream os;
  os << "density,radius_angstrom,n_sites,t2_us,beta,sse,accepted,attempted\n";
  for (const auto& r : rows) {
    os << format_double(r.density) << ',' << format_double(r.radius) << ','
       << r.n_sites << ',';
    append_fit(os, r.fit);
    os << ',' << r.accepted << ',' << r.attempted << '\n';
  }
  return os.str();
}

std::string disorder_table_csv(const std::vector<ensemble::DisorderRow>& rows) {
  std::ostringstream os;
  os << "sigma,t2_us,beta,sse,accepted,attempted\n";
  for (const auto& r : rows) {
    os << format_double(r.sigma) << ',';
    append_fit(os, r.fit);
    os << ',' << r.accepted << ',' << r.attempted << '\n';
  }
  return os.str();
}

std::string uniformity_table_csv(const ensemble::UniformityResult& result) {
  std::ostringstream os;
  os << "arm,t2_us,beta,sse\n";
  os << "random,";
  append_fit(os, result.random_fit);
  os << "\nuniform,";
  append_fit(os, result.uniform_fit);
  os << '\n';
  return os.str();
}

nlohmann::json lattice_to_json(const lattice::SiteLattice& lat) {
  json j;
  j["format_version"] = lattice_format_version;
  j["geometry"] =
      lat.geometry == lattice::Geometry::Sphere ? "sphere" : "cube";
  j["extent_angstrom"] = lat.extent;
  j["center"] = vec3_to_json(lat.center, false);
  j["central_site"] = lat.central_site;
  json sites = json::array();
  for (const auto& s : lat.sites) sites.push_back(vec3_to_json(s, true));
  j["sites"] = sites;
  j["regions"] = lat.region;
  return j;
}

lattice::SiteLattice lattice_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("lattice document: expected an object");
  auto ver = j.find("format_version");
  if (ver == j.end())
    throw ConfigError("lattice document: missing format_version");
  if (!ver->is_number_integer() ||
      ver->get<int>() != lattice_format_version)
    throw ConfigError("lattice document: unsupported format_version");

  lattice::SiteLattice lat;
  auto geom = j.find("geometry");
  if (geom == j.end() || !geom->is_string())
    throw ConfigError("lattice document: missing geometry");
  const std::string g = geom->get<std::string>();
  if (g == "sphere")
    lat.geometry = lattice::Geometry::Sphere;
  else if (g == "cube")
    lat.geometry = lattice::Geometry::DissectedCube;
  else
    throw ConfigError("lattice document: unknown geometry \"" + g + "\"");

  if (auto it = j.find("extent_angstrom"); it != j.end() && it->is_number())
    lat.extent = it->get<double>();
  else
    throw ConfigError("lattice document: missing extent_angstrom");
  if (auto it = j.find("center"); it != j.end())
    lat.center = vec3_from_json(*it, "lattice document center");
  if (auto it = j.find("central_site"); it != j.end() &&
      it->is_number_integer())
    lat.central_site = it->get<std::size_t>();

  auto sites = j.find("sites");
  if (sites == j.end() || !sites->is_array() || sites->empty())
    throw ConfigError("lattice document: missing sites");
  for (std::size_t i = 0; i < sites->size(); ++i)
    lat.sites.push_back(vec3_from_json(
        (*sites)[i], "lattice site " + std::to_string(i)));

  if (auto it = j.find("regions"); it != j.end()) {
    if (!it->is_array())
      throw ConfigError("lattice document: regions must be an array");
    for (const auto& r : *it) {
      if (!r.is_number_integer())
        throw ConfigError("lattice document: regions must be integers");
      lat.region.push_back(r.get<int>());
    }
    if (!lat.region.empty() && lat.region.size() != lat.sites.size())
      throw ConfigError("lattice document: regions length mismatch");
  }
  if (lat.central_site >= lat.sites.size())
    throw ConfigError("lattice document: central_site out of range");
  return lat;
}

void write_lattice_json(const std::string& path,
                        const lattice::SiteLattice& lat) {
  write_text(path, lattice_to_json(lat).dump(2) + "\n");
}

lattice::SiteLattice read_lattice_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lattice file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("lattice file is not valid JSON: ") +
                      e.what());
  }
  return lattice_from_json(j);
}

nlohmann::json manifest_json(const RunManifest& manifest) {
  json j;
  j["resolved_config"] = manifest.resolved_config;
  j["seed"] = manifest.seed;
  j["version"] = manifest.version.empty() ? version_string : manifest.version;
  j["wall_seconds"] = manifest.wall_seconds;
  j["accepted"] = manifest.accepted;
  j["attempted"] = manifest.attempted;
  j["outputs"] = manifest.outputs;
  j["status"] = manifest.status;
  if (!manifest.error.empty()) j["error"] = manifest.error;
  if (!manifest.extra.is_null()) j["summary"] = manifest.extra;
  return j;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  write_text(path, manifest_json(manifest).dump(2) + "\n");
}

}  // namespace ctspin::io
