#pragma once

#include <numbers>

// Unit conventions used throughout the library:
//   - all Hamiltonians are H/hbar in angular frequency units of rad/us
//     (equivalently "angular MHz"),
//   - time is in us, distances in Angstrom, fields in mT,
//   - user-facing inputs (GHz, MHz, mT) are converted at the boundary and
//     never reappear internally.
namespace ctspin::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Electron gyromagnetic ratio, ordinary (non-angular) MHz per mT.
inline constexpr double gamma_e_mhz_per_mt = 28.02495;

// Electron-to-proton gyromagnetic ratio.
inline constexpr double electron_proton_gamma_ratio = 658.21;

inline constexpr double gamma_p_mhz_per_mt =
    gamma_e_mhz_per_mt / electron_proton_gamma_ratio;

// Boundary conversions into internal angular units (rad/us).
inline constexpr double ghz(double f) { return two_pi * 1.0e3 * f; }
inline constexpr double mhz(double f) { return two_pi * f; }

// gamma [MHz/mT] -> [rad/us per mT]
inline constexpr double gamma_angular(double gamma_mhz_per_mt) {
  return two_pi * gamma_mhz_per_mt;
}

// Inverse conversions for reporting.
inline constexpr double to_mhz(double w) { return w / two_pi; }
inline constexpr double to_ghz(double w) { return w / (two_pi * 1.0e3); }

namespace detail {
inline constexpr double mu0_over_4pi = 1.0e-7;          // T m / A ... SI
inline constexpr double hbar = 1.054571817e-34;         // J s
}  // namespace detail

// Point-dipole coupling constant K such that the zz coupling between two
// spins at separation r (Angstrom) is K * (1 - 3 cos^2 theta) / r^3 in
// rad/us.  Gammas are given in ordinary MHz/mT; the conversion chain is
// (mu0/4pi) gamma1 gamma2 hbar with gamma in rad/s/T, then m^3 -> A^3 and
// rad/s -> rad/us.
inline constexpr double dipolar_constant(double gamma1_mhz_per_mt,
                                         double gamma2_mhz_per_mt) {
  constexpr double mhz_per_mt_to_si = two_pi * 1.0e9;  // rad/s/T
  return detail::mu0_over_4pi * (gamma1_mhz_per_mt * mhz_per_mt_to_si) *
         (gamma2_mhz_per_mt * mhz_per_mt_to_si) * detail::hbar * 1.0e30 /
         1.0e6;
}

}  // namespace ctspin::units
