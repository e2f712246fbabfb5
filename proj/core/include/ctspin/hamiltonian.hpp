#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ctspin/lattice.hpp"
#include "ctspin/units.hpp"

namespace ctspin::hamiltonian {

// Central-qubit parameters.  Energies are stored in angular units
// (rad/us); use the units:: helpers when ingesting GHz/MHz inputs.
struct QubitParams {
  double d = units::ghz(-45.0);  // longitudinal anisotropy
  double e = units::ghz(4.5);    // transverse anisotropy (half the gap)
  double b0_mt = 23.6;           // applied field
  double bmin_mt = 23.6;         // clock-transition field
  double gamma_e = units::gamma_angular(units::gamma_e_mhz_per_mt);
  double gamma_ratio = units::electron_proton_gamma_ratio;

  double detuning() const { return gamma_e * (b0_mt - bmin_mt); }
  double gamma_p() const { return gamma_e / gamma_ratio; }
};

// How pair couplings are obtained: point-dipole from positions, scaled by
// `scale`; or pinned to `fixed_jzz` (rad/us) for analytic scenarios.
struct CouplingModel {
  double scale = 1.0;
  std::optional<double> fixed_jzz;
};

// Per-spin transverse anisotropies, index-aligned with a
// SpinConfiguration.  gaps[0] belongs to the central spin and stays at
// the nominal E.
struct GapAssignment {
  std::vector<double> gaps;  // rad/us

  static GapAssignment uniform(double e, std::size_t n) {
    return {std::vector<double>(n, e)};
  }
};

struct SystemHamiltonian {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  std::string basis;
};

// Eigendecomposes once; reused by every evolution over a tau grid.
SystemHamiltonian make_system(Eigen::MatrixXcd h, std::string basis);

// Spin-1 operators over the |+1>,|0>,|-1> basis.
Eigen::Matrix3cd spin1_x();
Eigen::Matrix3cd spin1_y();
Eigen::Matrix3cd spin1_z();

inline const double default_dipolar_k =
    units::dipolar_constant(units::gamma_e_mhz_per_mt,
                            units::gamma_e_mhz_per_mt);

// Point-dipole coupling tensor K (3 r^ r^ - I)/|r|^3, rad/us.
Eigen::Matrix3d dipolar_tensor(const Eigen::Vector3d& r_i,
                               const Eigen::Vector3d& r_j,
                               double k = default_dipolar_k);

double coupling_zz(const Eigen::Vector3d& r_i, const Eigen::Vector3d& r_j,
                   double k = default_dipolar_k);

// Full S=1 Hamiltonian D(Sz^2 - 2/3) + E(Sx^2 - Sy^2) + gamma_e dB Sz.
SystemHamiltonian build_single_s1(const QubitParams& params);

// Restriction of a spin-1 operator to the two clock-transition
// eigenstates (|+1> +- |-1>)/sqrt(2).
Eigen::Matrix2cd project_spin1_operator(const Eigen::Matrix3cd& op);

// Two-level Hamiltonian E sigma_z + gamma_e dB sigma_x (traceless part of
// the projected S=1 Hamiltonian).
Eigen::Matrix2cd project_qubit(const QubitParams& params);

// Sum_i E_i sigma_z(i) + dB sigma_x(i) + Sum_{i<j} Jzz(i,j) sigma_x(i)
// sigma_x(j) over the 2^N product basis; spin i maps to bit N-1-i so the
// central spin owns the top bit.
SystemHamiltonian build_projected_n_spin(
    const lattice::SpinConfiguration& config, const QubitParams& params,
    const GapAssignment& gaps, const CouplingModel& coupling = {});

// Full S=1 electron coupled to one spin-1/2 proton at separation r:
// H_e x I + gamma_p B0 I x Iz + dipolar, secular SzIz term only unless
// full_tensor is set.
SystemHamiltonian build_electron_proton(const QubitParams& params,
                                        const Eigen::Vector3d& r,
                                        bool full_tensor = false,
                                        const CouplingModel& coupling = {});

}  // namespace ctspin::hamiltonian
