#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ctspin/hamiltonian.hpp"

namespace ctspin::echo {

struct DensityMatrix {
  Eigen::MatrixXcd matrix;
  std::string basis;
};

enum class Axis { X, Y };

enum class PulseTargets { AllSpins, ElectronOnly };

// Delays are tau; reported times are always 2*tau.
struct EchoProtocol {
  std::vector<double> tau_grid;
  PulseTargets targets = PulseTargets::AllSpins;

  // points evenly spaced in 2*tau over [0, two_tau_max]
  static EchoProtocol over_two_tau(double two_tau_max, std::size_t points,
                                   PulseTargets targets = PulseTargets::AllSpins);
};

struct CoherenceSeries {
  std::vector<double> two_tau;
  std::vector<double> values;
  std::map<std::string, std::string> meta;
};

// Product state of |+> = (|up>+|down>)/sqrt(2) on every qubit: the state
// right after the preparation pulse.
DensityMatrix initial_state(std::size_t n_spins);

// exp(-i angle sum_i S_axis(i)) over all n qubits, S = sigma/2.
Eigen::MatrixXcd pulse(Axis axis, double angle, std::size_t n_spins);

// Same rotation applied only to the electron's clock-transition doublet
// in the (S=1 electron) x (proton) basis; |0> and the proton are
// untouched.
Eigen::MatrixXcd electron_pulse(Axis axis, double angle);

DensityMatrix evolve(const hamiltonian::SystemHamiltonian& h,
                     const DensityMatrix& rho, double tau);

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep);

// Hahn echo: prepare along +x, free evolution tau, pi-x refocusing pulse,
// free evolution tau, reduce to the central spin and read the normalized
// in-plane magnetization L(2 tau).
CoherenceSeries hahn_echo(const hamiltonian::SystemHamiltonian& h,
                          const EchoProtocol& protocol,
                          std::size_t central = 0);

// Density-matrix reference implementation of the same protocol (slow;
// used to validate the statevector path).
CoherenceSeries hahn_echo_density(const hamiltonian::SystemHamiltonian& h,
                                  const EchoProtocol& protocol,
                                  std::size_t central = 0);

}  // namespace ctspin::echo
