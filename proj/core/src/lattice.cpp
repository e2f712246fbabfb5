#include "ctspin/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "ctspin/errors.hpp"

namespace ctspin::lattice {

namespace {

struct RankedSite {
  double distance;
  Eigen::Vector3d pos;
};

bool ranked_less(const RankedSite& a, const RankedSite& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return std::make_tuple(a.pos.x(), a.pos.y(), a.pos.z()) <
         std::make_tuple(b.pos.x(), b.pos.y(), b.pos.z());
}

// Enumerates host sites whose fractional indices can fall within
// `reach` (Euclidean) of `center`, calling f(position).
template <typename F>
void for_sites_in_reach(const UnitCell& cell, const Eigen::Vector3d& center,
                        double reach, F&& f) {
  Eigen::Matrix3d m;  // columns are the cell vectors
  m.col(0) = cell.vectors[0];
  m.col(1) = cell.vectors[1];
  m.col(2) = cell.vectors[2];
  const Eigen::Vector3d fc = m.fullPivLu().solve(center);
  const auto spacing = cell.plane_spacings();

  std::array<long, 3> lo{}, hi{};
  for (int d = 0; d < 3; ++d) {
    const double span = reach / spacing[d];
    lo[d] = static_cast<long>(std::floor(fc[d] - span)) - 2;
    hi[d] = static_cast<long>(std::ceil(fc[d] + span)) + 2;
  }
  for (long i = lo[0]; i <= hi[0]; ++i)
    for (long j = lo[1]; j <= hi[1]; ++j)
      for (long k = lo[2]; k <= hi[2]; ++k)
        for (std::size_t b = 0; b < cell.basis.size(); ++b)
          f(cell.site_position(i, j, k, b));
}

std::vector<RankedSite> collect_sphere(const UnitCell& cell,
                                       const Eigen::Vector3d& center,
                                       double radius) {
  std::vector<RankedSite> found;
  for_sites_in_reach(cell, center, radius, [&](const Eigen::Vector3d& p) {
    const double d = (p - center).norm();
    if (d < radius) found.push_back({d, p});
  });
  std::sort(found.begin(), found.end(), ranked_less);
  return found;
}

double linf(const Eigen::Vector3d& v) {
  return v.cwiseAbs().maxCoeff();
}

}  // namespace

double UnitCell::volume() const {
  return std::abs(vectors[0].cross(vectors[1]).dot(vectors[2]));
}

std::array<double, 3> UnitCell::plane_spacings() const {
  const double v = volume();
  return {v / vectors[1].cross(vectors[2]).norm(),
          v / vectors[2].cross(vectors[0]).norm(),
          v / vectors[0].cross(vectors[1]).norm()};
}

Eigen::Vector3d UnitCell::site_position(long i, long j, long k,
                                        std::size_t basis_index) const {
  const Eigen::Vector3d& f = basis[basis_index];
  return (static_cast<double>(i) + f.x()) * vectors[0] +
         (static_cast<double>(j) + f.y()) * vectors[1] +
         (static_cast<double>(k) + f.z()) * vectors[2];
}

UnitCell default_unit_cell() {
  UnitCell cell;
  cell.vectors = {Eigen::Vector3d(12.74, 0.00, 0.00),
                  Eigen::Vector3d(0.27, 13.07, 0.00),
                  Eigen::Vector3d(5.46, 2.42, 19.58)};
  cell.basis = {Eigen::Vector3d(0.8955, 0.9642, 0.5546),
                Eigen::Vector3d(0.9929, 0.8328, 0.1113)};
  return cell;
}

SiteLattice generate_sphere_sites(const UnitCell& cell, double radius,
                                  const Eigen::Vector3d& center) {
  if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
  auto found = collect_sphere(cell, center, radius);
  if (found.empty()) {
    std::ostringstream os;
    os << "empty lattice: no host site within " << radius
       << " A of the requested center";
    throw ConfigError(os.str());
  }
  SiteLattice lat;
  lat.geometry = Geometry::Sphere;
  lat.extent = radius;
  lat.center = center;
  lat.sites.reserve(found.size());
  for (const auto& s : found) lat.sites.push_back(s.pos);
  lat.central_site = 0;
  return lat;
}

DensityRadius radius_for_density(const UnitCell& cell, double density,
                                 std::size_t n_spins) {
  if (!(density > 0.0) || density > 1.0)
    throw ConfigError("density must lie in (0, 1]");
  if (n_spins < 1) throw ConfigError("n_spins must be >= 1");

  const auto target = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n_spins) / density));

  // Grow a trial radius until at least target+1 sites are visible, then
  // cut midway between the target-th shell and the next distinct one.
  const double site_density =
      static_cast<double>(cell.basis.size()) / cell.volume();
  double reach = 1.3 * std::cbrt(3.0 * static_cast<double>(target + 1) /
                                 (4.0 * std::numbers::pi * site_density)) +
                 5.0;
  std::vector<RankedSite> found;
  for (int attempt = 0; attempt < 32; ++attempt) {
    found = collect_sphere(cell, Eigen::Vector3d::Zero(), reach);
    if (found.size() > target) break;
    reach *= 1.4;
  }
  if (found.size() <= target)
    throw EngineError("radius_for_density failed to enclose enough sites");

  std::size_t cut = target;
  while (cut < found.size() &&
         found[cut].distance - found[cut - 1].distance <= 1e-9)
    ++cut;  // never split a degenerate shell
  if (cut >= found.size())
    throw EngineError("radius_for_density could not separate site shells");

  DensityRadius out;
  out.radius = 0.5 * (found[cut - 1].distance + found[cut].distance);
  out.site_count = cut;
  return out;
}

std::optional<double> calibrated_radius(double density) {
  static constexpr std::array<std::pair<double, double>, 11> table{{
      {0.001, 132.66},
      {0.002, 105.30},
      {0.003, 92.20},
      {0.004, 83.30},
      {0.005, 77.70},
      {0.006, 72.78},
      {0.007, 69.63},
      {0.008, 66.12},
      {0.009, 63.91},
      {0.010, 61.64},
      {0.100, 29.00},
  }};
  for (const auto& [x, r] : table)
    if (std::abs(density - x) < 1e-12) return r;
  return std::nullopt;
}

SiteLattice sphere_with_site_count(const UnitCell& cell,
                                   std::size_t n_sites) {
  if (n_sites < 1) throw ConfigError("sphere needs at least 1 site");
  // Reuse the density machinery: a sphere for n_sites spins at density 1
  // cuts midway past the n_sites-th shell.
  const DensityRadius dr = radius_for_density(cell, 1.0, n_sites);
  return generate_sphere_sites(cell, dr.radius);
}

SiteLattice build_dissected_cube(const UnitCell& cell,
                                 std::size_t n_sites_total) {
  if (n_sites_total < 7)
    throw ConfigError("dissected cube needs at least 7 sites");

  const Eigen::Vector3d center = Eigen::Vector3d::Zero();
  const double site_density =
      static_cast<double>(cell.basis.size()) / cell.volume();
  double half = 0.65 * std::cbrt(static_cast<double>(n_sites_total + 1) /
                                 site_density) +
                5.0;

  std::vector<RankedSite> found;
  for (int attempt = 0; attempt < 32; ++attempt) {
    found.clear();
    // L-inf ball of half-side `half`; Euclidean reach covers its corners.
    for_sites_in_reach(cell, center, half * std::sqrt(3.0) + 1.0,
                       [&](const Eigen::Vector3d& p) {
                         const Eigen::Vector3d d = p - center;
                         if (linf(d) < half) found.push_back({linf(d), p});
                       });
    if (found.size() > n_sites_total) break;
    half *= 1.3;
  }
  if (found.size() <= n_sites_total)
    throw EngineError("dissected cube failed to enclose enough sites");

  std::sort(found.begin(), found.end(), ranked_less);

  SiteLattice lat;
  lat.geometry = Geometry::DissectedCube;
  lat.center = center;
  lat.extent = 0.5 * (found[n_sites_total - 1].distance +
                      found[n_sites_total].distance);
  lat.sites.reserve(n_sites_total);
  for (std::size_t i = 0; i < n_sites_total; ++i)
    lat.sites.push_back(found[i].pos);
  lat.central_site = 0;

  // Central block: nearest ~n/7 by L-inf rank.  Outer regions keyed by
  // dominant displacement axis and sign: 1+2*axis for positive, +1 for
  // negative.
  const std::size_t n = n_sites_total;
  const std::size_t n_central = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(n) / 7.0)));
  lat.region.assign(n, 0);
  for (std::size_t i = n_central; i < n; ++i) {
    const Eigen::Vector3d d = lat.sites[i] - center;
    int axis = 0;
    double best = std::abs(d[0]);
    for (int a = 1; a < 3; ++a)
      if (std::abs(d[a]) > best) {
        best = std::abs(d[a]);
        axis = a;
      }
    lat.region[i] = 1 + 2 * axis + (d[axis] < 0.0 ? 1 : 0);
  }

  // Region counts must stay within +-10% of n/7.  The geometric assignment
  // already does for the sizes used in practice; degenerate small cubes
  // get an explicit rebalancing pass (move the least-dominant site of the
  // fullest outer region into the emptiest one).
  const double ideal = static_cast<double>(n) / 7.0;
  const auto lo = static_cast<long>(std::ceil(0.9 * ideal));
  const auto hi = static_cast<long>(std::floor(1.1 * ideal));
  std::array<long, 7> count{};
  for (int r : lat.region) ++count[static_cast<std::size_t>(r)];

  auto dominance_margin = [&](std::size_t i) {
    Eigen::Vector3d a = (lat.sites[i] - center).cwiseAbs();
    std::array<double, 3> v{a[0], a[1], a[2]};
    std::sort(v.begin(), v.end());
    return v[2] - v[1];
  };

  for (std::size_t guard = 0; guard < n; ++guard) {
    int over = -1, under = -1;
    for (int r = 1; r <= 6; ++r) {
      if (count[static_cast<std::size_t>(r)] > hi &&
          (over < 0 || count[static_cast<std::size_t>(r)] >
                           count[static_cast<std::size_t>(over)]))
        over = r;
      if (count[static_cast<std::size_t>(r)] < lo &&
          (under < 0 || count[static_cast<std::size_t>(r)] <
                            count[static_cast<std::size_t>(under)]))
        under = r;
    }
    if (over < 0 && under < 0) break;
    int donor = over >= 0 ? over : -1;
    if (donor < 0) {
      for (int r = 1; r <= 6; ++r)
        if (r != under && count[static_cast<std::size_t>(r)] > lo &&
            (donor < 0 || count[static_cast<std::size_t>(r)] >
                              count[static_cast<std::size_t>(donor)]))
          donor = r;
    }
    int sink = under >= 0 ? under : -1;
    if (sink < 0) {
      for (int r = 1; r <= 6; ++r)
        if (r != donor && count[static_cast<std::size_t>(r)] < hi &&
            (sink < 0 || count[static_cast<std::size_t>(r)] <
                             count[static_cast<std::size_t>(sink)]))
          sink = r;
    }
    if (donor < 0 || sink < 0 || donor == sink) break;
    std::size_t pick = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = n_central; i < n; ++i)
      if (lat.region[i] == donor && dominance_margin(i) < best) {
        best = dominance_margin(i);
        pick = i;
      }
    if (pick == n) break;
    lat.region[pick] = sink;
    --count[static_cast<std::size_t>(donor)];
    ++count[static_cast<std::size_t>(sink)];
  }

  return lat;
}

SpinConfiguration sample_configuration(const SiteLattice& lat,
                                       std::size_t n_spins,
                                       rng::Stream& stream) {
  if (n_spins < 1) throw ConfigError("a configuration needs at least 1 spin");
  if (n_spins > lat.size()) {
    std::ostringstream os;
    os << "cannot place " << n_spins << " spins on " << lat.size()
       << " sites";
    throw ConfigError(os.str());
  }

  SpinConfiguration config;
  config.center = lat.center;
  config.parent_extent = lat.extent;
  config.site_indices.push_back(lat.central_site);
  config.positions.push_back(lat.sites[lat.central_site]);

  if (n_spins > 1) {
    // Draw bath sites from the index set with the central site removed.
    const auto draws =
        stream.sample_without_replacement(lat.size() - 1, n_spins - 1);
    for (std::size_t d : draws) {
      const std::size_t idx = d < lat.central_site ? d : d + 1;
      config.site_indices.push_back(idx);
      config.positions.push_back(lat.sites[idx]);
    }
  }
  return config;
}

SpinConfiguration extend_configuration(const SpinConfiguration& config,
                                       const SiteLattice& enlarged,
                                       rng::Stream& stream) {
  if (enlarged.geometry != Geometry::Sphere)
    throw ConfigError("extend_configuration expects a spherical lattice");
  if (!(enlarged.extent > config.parent_extent))
    throw ConfigError(
        "enlarged lattice does not extend beyond the configuration's parent");

  std::vector<std::size_t> shell;
  for (std::size_t i = 0; i < enlarged.size(); ++i)
    if ((enlarged.sites[i] - enlarged.center).norm() > config.parent_extent)
      shell.push_back(i);
  if (shell.empty())
    throw ConfigError("empty shell: enlarged lattice adds no new sites");

  SpinConfiguration out = config;
  const std::size_t pick =
      shell[static_cast<std::size_t>(stream.uniform_below(shell.size()))];
  out.site_indices.push_back(pick);
  out.positions.push_back(enlarged.sites[pick]);
  out.parent_extent = enlarged.extent;
  return out;
}

SpinConfiguration sample_uniform_configuration(const SiteLattice& cube,
                                               rng::Stream& stream) {
  if (cube.geometry != Geometry::DissectedCube || cube.region.empty())
    throw ConfigError("uniform sampling requires a dissected cube");

  SpinConfiguration config;
  config.center = cube.center;
  config.parent_extent = cube.extent;
  config.site_indices.push_back(cube.central_site);
  config.positions.push_back(cube.sites[cube.central_site]);

  for (int r = 1; r <= 6; ++r) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < cube.size(); ++i)
      if (cube.region[i] == r) members.push_back(i);
    if (members.empty()) {
      std::ostringstream os;
      os << "outer region " << r << " of the dissected cube is empty";
      throw ConfigError(os.str());
    }
    const std::size_t pick =
        members[static_cast<std::size_t>(stream.uniform_below(members.size()))];
    config.site_indices.push_back(pick);
    config.positions.push_back(cube.sites[pick]);
  }
  return config;
}

}  // namespace ctspin::lattice
