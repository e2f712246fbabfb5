#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

// Deterministic randomness utilities.  Child streams are derived from
// (master seed, configuration index, purpose tag) so that independent
// consumers never share a stream and results are reproducible regardless
// of scheduling.  Distribution sampling is implemented here rather than
// with <random> distributions because the standard leaves those
// implementation-defined and identical output across toolchains is part
// of the contract.
namespace ctspin::rng {

inline constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Child seed for one (configuration, purpose) pair.
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::uint64_t index,
                                           std::string_view purpose) {
  std::uint64_t state = master;
  std::uint64_t a = splitmix64_next(state);
  state ^= index * 0x9e3779b97f4a7c15ull;
  std::uint64_t b = splitmix64_next(state);
  state ^= fnv1a(purpose);
  std::uint64_t c = splitmix64_next(state);
  return a ^ (b + 0x9e3779b97f4a7c15ull) ^ (c << 1);
}

// xoshiro-free minimal generator: splitmix64 applied to a counter is a
// fine PRNG for Monte Carlo purposes and trivially reproducible.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); rejection keeps the draw unbiased.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Standard normal via Box-Muller; the second value of the pair is
  // discarded so the draw count per call is fixed.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform_below(n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ctspin::rng
