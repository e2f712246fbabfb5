#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "ctspin/rng.hpp"

namespace ctspin::lattice {

// Triclinic host cell with a two-site motif.  Vectors are rows in
// Cartesian Angstrom; basis entries are fractional coordinates in [0,1).
struct UnitCell {
  std::array<Eigen::Vector3d, 3> vectors;
  std::vector<Eigen::Vector3d> basis;

  double volume() const;

  // Distance between consecutive lattice planes normal to each pair of
  // cell vectors; bounds how far a fractional index can move a point.
  std::array<double, 3> plane_spacings() const;

  Eigen::Vector3d site_position(long i, long j, long k,
                                std::size_t basis_index) const;
};

// Host cell of the molecular crystal this library models.
UnitCell default_unit_cell();

// Positions closer than this are considered the same site.
inline constexpr double duplicate_tolerance = 1e-6;

enum class Geometry { Sphere, DissectedCube };

// Finite site set cut from the infinite lattice.  Sites are sorted by
// distance from the construction center (Euclidean for spheres, L-inf for
// cubes; ties broken lexicographically), so sites[0] is the host site the
// central spin occupies.
struct SiteLattice {
  Geometry geometry = Geometry::Sphere;
  double extent = 0.0;  // sphere radius, or cube half-side
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> sites;
  std::size_t central_site = 0;
  std::vector<int> region;  // cube only: 0 = central block, 1..6 outer

  std::size_t size() const { return sites.size(); }
};

SiteLattice generate_sphere_sites(
    const UnitCell& cell, double radius,
    const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

struct DensityRadius {
  double radius = 0.0;
  std::size_t site_count = 0;
};

// Smallest sphere radius whose site count reaches ceil(n_spins/density),
// placed midway between consecutive site shells.
DensityRadius radius_for_density(const UnitCell& cell, double density,
                                 std::size_t n_spins);

// Calibrated sphere radii for the densities used by the standard scans;
// radius_for_density covers everything else.
std::optional<double> calibrated_radius(double density);

// Smallest sphere holding exactly n_sites (cut midway between shells).
SiteLattice sphere_with_site_count(const UnitCell& cell,
                                   std::size_t n_sites);

SiteLattice build_dissected_cube(const UnitCell& cell,
                                 std::size_t n_sites_total);

// N spins on distinct lattice sites; positions[0] is the central spin.
struct SpinConfiguration {
  std::vector<Eigen::Vector3d> positions;
  std::vector<std::size_t> site_indices;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double parent_extent = 0.0;  // extent of the lattice it was sampled from

  std::size_t size() const { return positions.size(); }
};

SpinConfiguration sample_configuration(const SiteLattice& lat,
                                       std::size_t n_spins,
                                       rng::Stream& stream);

// Adds one spin uniformly on the shell `enlarged` minus the configuration's
// parent lattice; existing positions are untouched.
SpinConfiguration extend_configuration(const SpinConfiguration& config,
                                       const SiteLattice& enlarged,
                                       rng::Stream& stream);

// One spin per outer region of a dissected cube, central spin at the
// center block's host site, no bath spin inside the center block.
SpinConfiguration sample_uniform_configuration(const SiteLattice& cube,
                                               rng::Stream& stream);

}  // namespace ctspin::lattice
