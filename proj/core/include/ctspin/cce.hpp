#pragma once

#include <cstddef>
#include <vector>

#include "ctspin/echo.hpp"
#include "ctspin/hamiltonian.hpp"
#include "ctspin/lattice.hpp"

// Cluster correlation expansion: factorizes the central spin's coherence
// into contributions from connected clusters of bath spins.
namespace ctspin::cce {

struct CceConfig {
  int max_order = 3;
  double r_bath = 136.63;    // bath spins beyond this never enter clusters
  double r_dipole = 40.0;    // adjacency cutoff when forming clusters
  double divergence_threshold = 1e3;
  double zero_crossing_epsilon = 1e-6;
};

void validate(const CceConfig& config);

// Bath-spin indices into the parent SpinConfiguration (central spin 0
// excluded), kept sorted.
using Cluster = std::vector<std::size_t>;

// All connected subsets of the r_bath-filtered bath with 1..max_order
// spins, adjacency |r_i - r_j| <= r_dipole; ordered by size then
// lexicographically.
std::vector<Cluster> enumerate_clusters(
    const lattice::SpinConfiguration& config, const CceConfig& cce);

// Raw coherence L_C of the central spin interacting with one cluster
// only; same pulse protocol as the full simulation.
echo::CoherenceSeries cluster_coherence(
    const Cluster& cluster, const lattice::SpinConfiguration& config,
    const hamiltonian::QubitParams& params,
    const hamiltonian::GapAssignment& gaps,
    const echo::EchoProtocol& protocol,
    const hamiltonian::CouplingModel& coupling = {});

struct RawContribution {
  Cluster cluster;
  std::vector<double> values;  // L_C on the shared grid
};

struct ClusterContribution {
  Cluster cluster;
  std::vector<double> tilde;  // L~_C after subcluster division
  bool valid = true;
};

struct Assembled {
  std::vector<double> values;
  bool valid = true;
  std::size_t divergent_clusters = 0;
  std::vector<ClusterContribution> contributions;
};

// Recursive factorization: L~ of each cluster is its raw coherence
// divided pointwise by the product of every proper subcluster's L~; the
// assembled series is the product of all L~.  Contributions whose values
// blow past divergence_threshold, go non-finite, or divide by a
// subcluster product inside zero_crossing_epsilon are flagged and
// invalidate the result.  Independent of input ordering.
Assembled assemble(const std::vector<RawContribution>& raw,
                   const CceConfig& cce);

struct CceResult {
  echo::CoherenceSeries series;
  bool valid = true;
  std::size_t n_clusters = 0;
  std::size_t divergent_clusters = 0;
};

// enumerate -> per-cluster echo -> assemble.
CceResult compute_cce(const lattice::SpinConfiguration& config,
                      const hamiltonian::QubitParams& params,
                      const hamiltonian::GapAssignment& gaps,
                      const echo::EchoProtocol& protocol,
                      const CceConfig& cce,
                      const hamiltonian::CouplingModel& coupling = {});

}  // namespace ctspin::cce
