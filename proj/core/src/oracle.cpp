#include "ctspin/oracle.hpp"

#include <cmath>
#include <complex>

namespace ctspin::oracle {

namespace {
constexpr std::complex<double> I{0.0, 1.0};
}

double resonant_coherence(double e, double j, double tau) {
  const double xi = 4.0 * e * e + j * j;
  const double sq = std::sqrt(xi);
  return 4.0 * e * e * std::cos(2.0 * j * tau) / xi +
         j * std::sin(2.0 * j * tau) * std::sin(2.0 * tau * sq) / sq +
         j * j * std::cos(2.0 * j * tau) * std::cos(2.0 * tau * sq) / xi;
}

double offresonant_coherence(double /*e*/, double j, double delta,
                             double tau) {
  const double denom = delta * delta + j * j;
  if (denom == 0.0) return 1.0;
  const double omega = std::sqrt(denom);
  return delta * delta / denom +
         (j * j / denom) * std::cos(2.0 * tau * omega);
}

double offresonant_leading(double e, double j, double delta, double tau) {
  const double denom = 4.0 * delta * delta * e * e + delta * delta * j * j +
                       4.0 * e * e * j * j + j * j * j * j;
  if (denom == 0.0) return 1.0;
  const double omega = std::sqrt(delta * delta + j * j);
  return (4.0 * delta * delta * e * e +
          4.0 * e * e * j * j * std::cos(2.0 * tau * omega)) /
         denom;
}

AmplitudeFrequency amplitude_frequency(double j, double delta) {
  const double denom = delta * delta + j * j;
  AmplitudeFrequency out;
  out.amplitude = denom == 0.0 ? 1.0 : j * j / denom;
  out.omega = std::sqrt(denom);
  return out;
}

Eigen::Matrix4cd two_spin_propagator(double e, double j, double tau) {
  // H splits over {uu, dd} and {ud, du}; each block is a 2x2 rotation.
  const double xi = 4.0 * e * e + j * j;
  const double sq = std::sqrt(xi);
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();

  const std::complex<double> outer_c =
      std::cos(sq * tau) - 2.0 * I * e * std::sin(sq * tau) / sq;
  const std::complex<double> outer_x = -I * j * std::sin(sq * tau) / sq;
  u(0, 0) = outer_c;
  u(3, 3) = std::conj(outer_c);
  u(0, 3) = outer_x;
  u(3, 0) = outer_x;

  u(1, 1) = std::cos(j * tau);
  u(2, 2) = std::cos(j * tau);
  u(1, 2) = -I * std::sin(j * tau);
  u(2, 1) = -I * std::sin(j * tau);
  return u;
}

double detuned_single_spin_echo(double e, double w, double tau) {
  const double omega2 = e * e + w * w;
  if (omega2 == 0.0) return 1.0;
  const double omega = std::sqrt(omega2);
  const double s2 = w * w / omega2;
  const double c2 = e * e / omega2;
  const double f = 1.0 - std::cos(2.0 * omega * tau);
  return 1.0 - 2.0 * s2 * c2 * f * f;
}

}  // namespace ctspin::oracle
