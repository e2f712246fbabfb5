#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace ctspin::fitting {

struct FitResult {
  double t2 = 0.0;    // us
  double beta = 0.0;  // stretching exponent
  double sse = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct CosineFit {
  double amplitude = 0.0;
  double omega = 0.0;  // rad/us
  double offset = 0.0;
  double sse = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline constexpr double beta_min = 0.3;
inline constexpr double beta_max = 3.0;

// Least-squares fit of exp(-(t/T2)^beta) to a coherence decay.
// Deterministic multi-start (5x5 grid over log T2 and beta) followed by
// Levenberg-Marquardt refinement with analytic gradients. fit_max_2tau
// truncates the fit window.  Throws when the signal never drops below
// 0.95 (nothing to fit; the message reports the resulting T2 lower
// bound).
FitResult fit_stretched_exponential(
    const std::vector<double>& two_tau, const std::vector<double>& values,
    std::optional<double> fit_max_2tau = std::nullopt);

// Least-squares fit of A cos(omega t) + B, with omega seeded from the
// discrete spectrum peak of the mean-subtracted signal.  Throws a
// flat-signal error when no peak rises above the noise floor.
CosineFit fit_cosine_offset(const std::vector<double>& two_tau,
                            const std::vector<double>& values);

LinearFit fit_linear(const std::vector<double>& x,
                     const std::vector<double>& y);

}  // namespace ctspin::fitting
