#include "ctspin/cce.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ctspin/errors.hpp"

namespace ctspin::cce {

void validate(const CceConfig& config) {
  if (config.max_order < 1)
    throw ConfigError("cce max_order must be at least 1");
  if (!(config.r_dipole > 0.0))
    throw ConfigError("cce r_dipole must be positive");
  if (config.r_bath < config.r_dipole)
    throw ConfigError("cce r_bath must be at least r_dipole");
  if (!(config.divergence_threshold > 0.0))
    throw ConfigError("cce divergence threshold must be positive");
  if (config.zero_crossing_epsilon < 0.0)
    throw ConfigError("cce zero-crossing epsilon must be non-negative");
}

std::vector<Cluster> enumerate_clusters(
    const lattice::SpinConfiguration& config, const CceConfig& cce) {
  validate(cce);
  const std::size_t n = config.size();

  std::vector<std::size_t> bath;
  for (std::size_t i = 1; i < n; ++i)
    if ((config.positions[i] - config.positions[0]).norm() <= cce.r_bath)
      bath.push_back(i);

  const std::size_t m = bath.size();
  std::vector<std::vector<std::size_t>> adj(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if ((config.positions[bath[a]] - config.positions[bath[b]]).norm() <=
          cce.r_dipole) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }

  std::vector<Cluster> out;
  std::set<std::vector<std::size_t>> current;  // bath-array index space
  for (std::size_t a = 0; a < m; ++a) current.insert({a});

  for (int order = 1; order <= cce.max_order; ++order) {
    for (const auto& c : current) {
      Cluster mapped(c.size());
      std::transform(c.begin(), c.end(), mapped.begin(),
                     [&](std::size_t a) { return bath[a]; });
      out.push_back(std::move(mapped));
    }
    if (order == cce.max_order) break;

    std::set<std::vector<std::size_t>> grown;
    for (const auto& c : current)
      for (std::size_t member : c)
        for (std::size_t u : adj[member])
          if (!std::binary_search(c.begin(), c.end(), u)) {
            std::vector<std::size_t> bigger(c);
            bigger.insert(
                std::upper_bound(bigger.begin(), bigger.end(), u), u);
            grown.insert(std::move(bigger));
          }
    current = std::move(grown);
    if (current.empty()) break;
  }
  return out;
}

echo::CoherenceSeries cluster_coherence(
    const Cluster& cluster, const lattice::SpinConfiguration& config,
    const hamiltonian::QubitParams& params,
    const hamiltonian::GapAssignment& gaps, const echo::EchoProtocol& protocol,
    const hamiltonian::CouplingModel& coupling) {
  lattice::SpinConfiguration sub;
  sub.center = config.center;
  sub.parent_extent = config.parent_extent;
  sub.positions.push_back(config.positions[0]);
  sub.site_indices.push_back(
      config.site_indices.empty() ? 0 : config.site_indices[0]);

  hamiltonian::GapAssignment sub_gaps;
  sub_gaps.gaps.push_back(gaps.gaps[0]);
  for (std::size_t idx : cluster) {
    sub.positions.push_back(config.positions[idx]);
    sub.site_indices.push_back(
        idx < config.site_indices.size() ? config.site_indices[idx] : idx);
    sub_gaps.gaps.push_back(gaps.gaps[idx]);
  }

  const auto h = hamiltonian::build_projected_n_spin(sub, params, sub_gaps,
                                                     coupling);
  return echo::hahn_echo(h, protocol, 0);
}

Assembled assemble(const std::vector<RawContribution>& raw,
                   const CceConfig& cce) {
  validate(cce);

  // Canonical processing order makes the result independent of how the
  // caller produced the list.
  std::vector<const RawContribution*> ordered;
  ordered.reserve(raw.size());
  for (const auto& r : raw) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const RawContribution* a, const RawContribution* b) {
              if (a->cluster.size() != b->cluster.size())
                return a->cluster.size() < b->cluster.size();
              return a->cluster < b->cluster;
            });

  Assembled result;
  if (ordered.empty()) return result;
  const std::size_t npts = ordered.front()->values.size();
  result.values.assign(npts, 1.0);
  // pointers into this vector are cached below; no reallocation allowed
  result.contributions.reserve(ordered.size());

  std::map<Cluster, const std::vector<double>*> tilde_of;

  for (const RawContribution* r : ordered) {
    if (r->values.size() != npts)
      throw ConfigError("cluster contributions disagree on grid length");

    ClusterContribution contrib;
    contrib.cluster = r->cluster;
    contrib.tilde = r->values;

    // Divide out every proper subcluster that has a contribution;
    // disconnected subsets were never enumerated and divide nothing.
    const std::size_t k = r->cluster.size();
    if (k > 1) {
      std::vector<double> denom(npts, 1.0);
      const std::size_t subsets = std::size_t{1} << k;
      for (std::size_t bits = 1; bits + 1 < subsets; ++bits) {
        Cluster sub;
        for (std::size_t pos = 0; pos < k; ++pos)
          if (bits & (std::size_t{1} << pos)) sub.push_back(r->cluster[pos]);
        const auto it = tilde_of.find(sub);
        if (it == tilde_of.end()) continue;
        for (std::size_t t = 0; t < npts; ++t)
          denom[t] *= (*it->second)[t];
      }
      for (std::size_t t = 0; t < npts; ++t) {
        if (std::abs(denom[t]) < cce.zero_crossing_epsilon ||
            denom[t] == 0.0) {
          contrib.valid = false;
        }
        contrib.tilde[t] /= denom[t];
      }
    }

    for (double v : contrib.tilde)
      if (!std::isfinite(v) || std::abs(v) > cce.divergence_threshold) {
        contrib.valid = false;
        break;
      }

    if (!contrib.valid) {
      ++result.divergent_clusters;
      result.valid = false;
    }
    for (std::size_t t = 0; t < npts; ++t)
      result.values[t] *= contrib.tilde[t];

    result.contributions.push_back(std::move(contrib));
    tilde_of[result.contributions.back().cluster] =
        &result.contributions.back().tilde;
  }
  return result;
}

CceResult compute_cce(const lattice::SpinConfiguration& config,
                      const hamiltonian::QubitParams& params,
                      const hamiltonian::GapAssignment& gaps,
                      const echo::EchoProtocol& protocol, const CceConfig& cce,
                      const hamiltonian::CouplingModel& coupling) {
  const auto clusters = enumerate_clusters(config, cce);

  std::vector<RawContribution> raw;
  raw.reserve(clusters.size());
  for (const auto& c : clusters) {
    RawContribution r;
    r.cluster = c;
    r.values =
        cluster_coherence(c, config, params, gaps, protocol, coupling).values;
    raw.push_back(std::move(r));
  }

  const Assembled assembled = assemble(raw, cce);

  CceResult out;
  out.valid = assembled.valid;
  out.n_clusters = clusters.size();
  out.divergent_clusters = assembled.divergent_clusters;
  out.series.values = assembled.values;
  out.series.two_tau.reserve(protocol.tau_grid.size());
  for (double tau : protocol.tau_grid)
    out.series.two_tau.push_back(2.0 * tau);
  if (out.series.values.empty())
    out.series.values.assign(out.series.two_tau.size(), 1.0);
  out.series.meta["engine"] = "cce";
  return out;
}

}  // namespace ctspin::cce
