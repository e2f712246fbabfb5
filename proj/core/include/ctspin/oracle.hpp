#pragma once

#include <Eigen/Dense>

// Closed-form two-spin coherence expressions, used as ground truth when
// validating the echo engine and the cluster expansion.  All inputs are
// angular (rad/us); tau is in us and results are L(2*tau).
namespace ctspin::oracle {

// Two resonant spins with equal gaps 2E and sigma_x sigma_x coupling J:
// the exact three-term echo coherence.
double resonant_coherence(double e, double j, double tau);

// Weak-coupling (E >> J) coherence for gap difference delta:
// B + A cos(2 tau sqrt(delta^2 + J^2)) with A = J^2/(delta^2 + J^2).
double offresonant_coherence(double e, double j, double delta, double tau);

// Leading exact terms (constant plus first harmonic) of the off-resonant
// coherence for a pair with gaps split symmetrically to E +- delta/2.
// The dropped fast harmonics are second order in (J, delta)/E; an
// asymmetric split {E, E + delta} would add a first-order envelope
// 2 J^2 delta / ((delta^2 + J^2) E) on top.
double offresonant_leading(double e, double j, double delta, double tau);

struct AmplitudeFrequency {
  double amplitude;  // J^2/(delta^2+J^2)
  double omega;      // sqrt(delta^2+J^2), rad/us
};

AmplitudeFrequency amplitude_frequency(double j, double delta);

// Exact propagator exp(-i H tau) for H = 2E(Sz0+S0z) + 4J Sxx over the
// product basis {uu, ud, du, dd}.
Eigen::Matrix4cd two_spin_propagator(double e, double j, double tau);

// Exact echo envelope of one isolated spin with gap term E sigma_z and
// transverse detuning w sigma_x: the pi-x pulse commutes with the
// detuning but not the gap, leaving a bounded refocusing error.
double detuned_single_spin_echo(double e, double w, double tau);

}  // namespace ctspin::oracle
