#include "ctspin/echo.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "ctspin/errors.hpp"

namespace ctspin::echo {

namespace {

constexpr std::complex<double> I{0.0, 1.0};

std::size_t qubit_count(Eigen::Index dim) {
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim)
    throw EngineError("state dimension is not a power of two");
  return n;
}

Eigen::Matrix2cd qubit_rotation(Axis axis, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  Eigen::Matrix2cd r;
  if (axis == Axis::X)
    r << c, -I * s, -I * s, c;
  else
    r << c, -s, s, c;
  return r;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// exp(-i H tau) rho exp(+i H tau) via the cached eigenbasis.
Eigen::MatrixXcd evolve_matrix(const hamiltonian::SystemHamiltonian& h,
                               const Eigen::MatrixXcd& rho, double tau) {
  const Eigen::Index dim = h.matrix.rows();
  if (rho.rows() != dim || rho.cols() != dim)
    throw EngineError("density matrix dimension does not match Hamiltonian");
  Eigen::VectorXcd phase(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    phase[i] = std::exp(-I * h.eigenvalues[i] * tau);
  const Eigen::MatrixXcd u =
      h.eigenvectors * phase.asDiagonal() * h.eigenvectors.adjoint();
  return u * rho * u.adjoint();
}

}  // namespace

EchoProtocol EchoProtocol::over_two_tau(double two_tau_max, std::size_t points,
                                        PulseTargets targets) {
  if (points < 2) throw ConfigError("a tau grid needs at least 2 points");
  if (!(two_tau_max > 0.0)) throw ConfigError("two_tau_max must be positive");
  EchoProtocol p;
  p.targets = targets;
  p.tau_grid.resize(points);
  for (std::size_t i = 0; i < points; ++i)
    p.tau_grid[i] = 0.5 * two_tau_max * static_cast<double>(i) /
                    static_cast<double>(points - 1);
  return p;
}

DensityMatrix initial_state(std::size_t n_spins) {
  if (n_spins < 1) throw ConfigError("initial state needs at least 1 spin");
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  DensityMatrix rho;
  rho.basis = "projected-qubit";
  rho.matrix = Eigen::MatrixXcd::Constant(
      dim, dim, std::complex<double>(1.0 / static_cast<double>(dim), 0.0));
  return rho;
}

Eigen::MatrixXcd pulse(Axis axis, double angle, std::size_t n_spins) {
  if (n_spins < 1) throw ConfigError("pulse needs at least 1 target");
  const Eigen::Matrix2cd r = qubit_rotation(axis, angle);
  Eigen::MatrixXcd out = r;
  for (std::size_t i = 1; i < n_spins; ++i) out = kron(out, r);
  return out;
}

Eigen::MatrixXcd electron_pulse(Axis axis, double angle) {
  // Clock-transition doublet embedded in the S=1 space: columns of w are
  // the qubit |up>, |down> states in the |+1>,|0>,|-1> basis.
  Eigen::Matrix<std::complex<double>, 3, 2> w;
  const double s = 1.0 / std::sqrt(2.0);
  w << s, s, 0.0, 0.0, s, -s;
  const Eigen::Matrix2cd r = qubit_rotation(axis, angle);
  const Eigen::Matrix3cd proj = w * w.adjoint();
  const Eigen::Matrix3cd r3 =
      w * r * w.adjoint() + (Eigen::Matrix3cd::Identity() - proj);
  return kron(r3, Eigen::Matrix2cd::Identity());
}

DensityMatrix evolve(const hamiltonian::SystemHamiltonian& h,
                     const DensityMatrix& rho, double tau) {
  if (tau < 0.0) throw ConfigError("evolution time must be non-negative");
  DensityMatrix out;
  out.basis = rho.basis;
  out.matrix = evolve_matrix(h, rho.matrix, tau);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep) {
  const Eigen::Index dim = rho.matrix.rows();
  const std::size_t n = qubit_count(dim);
  if (keep >= n) throw EngineError("partial trace index out of range");

  const std::size_t mask = std::size_t{1} << (n - 1 - keep);
  DensityMatrix out;
  out.basis = rho.basis;
  out.matrix = Eigen::Matrix2cd::Zero();
  for (std::size_t s = 0; s < static_cast<std::size_t>(dim); ++s) {
    const std::size_t row = (s & mask) ? 1 : 0;
    // trace over every spin except `keep`: pair s with s^mask for the
    // off-diagonal block, itself for the diagonal.
    out.matrix(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(row)) +=
        rho.matrix(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    const std::size_t partner = s ^ mask;
    out.matrix(static_cast<Eigen::Index>(row),
               static_cast<Eigen::Index>(1 - row)) +=
        rho.matrix(static_cast<Eigen::Index>(s),
                   static_cast<Eigen::Index>(partner));
  }
  return out;
}

namespace {

// Statevector path: uniform initial amplitudes, two eigenbasis phase
// applications, and the all-spin pi-x pulse as an index reversal (its
// global phase cancels in the expectation value).
CoherenceSeries hahn_echo_state(const hamiltonian::SystemHamiltonian& h,
                                const EchoProtocol& protocol,
                                std::size_t central) {
  const Eigen::Index dim = h.matrix.rows();
  const std::size_t n = qubit_count(dim);
  if (central >= n) throw EngineError("central spin index out of range");
  const std::size_t mask = std::size_t{1} << (n - 1 - central);

  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  const Eigen::VectorXcd a =
      h.eigenvectors.adjoint() *
      Eigen::VectorXcd::Constant(dim, std::complex<double>(amp, 0.0));

  CoherenceSeries series;
  series.two_tau.reserve(protocol.tau_grid.size());
  series.values.reserve(protocol.tau_grid.size());

  const Eigen::Index chunk = 256;
  const auto total = static_cast<Eigen::Index>(protocol.tau_grid.size());
  Eigen::MatrixXcd phases(dim, chunk), psi(dim, chunk), mixed(dim, chunk);

  for (Eigen::Index start = 0; start < total; start += chunk) {
    const Eigen::Index cols = std::min(chunk, total - start);
    for (Eigen::Index t = 0; t < cols; ++t) {
      const double tau = protocol.tau_grid[static_cast<std::size_t>(start + t)];
      for (Eigen::Index i = 0; i < dim; ++i)
        phases(i, t) = std::exp(-I * h.eigenvalues[i] * tau);
      mixed.col(t) = a.cwiseProduct(phases.col(t));
    }
    psi.leftCols(cols) = h.eigenvectors * mixed.leftCols(cols);
    psi.leftCols(cols) = psi.leftCols(cols).colwise().reverse().eval();
    mixed.leftCols(cols) =
        (h.eigenvectors.adjoint() * psi.leftCols(cols)).cwiseProduct(
            phases.leftCols(cols));
    psi.leftCols(cols) = h.eigenvectors * mixed.leftCols(cols);

    for (Eigen::Index t = 0; t < cols; ++t) {
      const double tau = protocol.tau_grid[static_cast<std::size_t>(start + t)];
      series.two_tau.push_back(2.0 * tau);
      if (tau == 0.0) {
        // the uniform state is invariant under the refocusing pulse
        series.values.push_back(1.0);
        continue;
      }
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t s = 0; s < static_cast<std::size_t>(dim); ++s)
        if (!(s & mask))
          acc += std::conj(psi(static_cast<Eigen::Index>(s), t)) *
                 psi(static_cast<Eigen::Index>(s | mask), t);
      series.values.push_back(2.0 * acc.real());
    }
  }
  return series;
}

// Electron-proton path: mixed initial proton state forces the density
// representation; pulses touch only the electron doublet and the readout
// operator is the embedded qubit sigma_x.
CoherenceSeries hahn_echo_electron_proton(
    const hamiltonian::SystemHamiltonian& h, const EchoProtocol& protocol) {
  Eigen::Vector3cd up;
  up << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd rho0 =
      kron(up * up.adjoint(), 0.5 * Eigen::Matrix2cd::Identity());

  const Eigen::MatrixXcd prep = electron_pulse(Axis::Y, 0.5 * std::numbers::pi);
  const Eigen::MatrixXcd flip = electron_pulse(Axis::X, std::numbers::pi);
  rho0 = prep * rho0 * prep.adjoint();

  // Embedded qubit sigma_x equals the spin-1 Sz restricted to the doublet.
  const Eigen::MatrixXcd readout = hamiltonian::spin1_z();

  // Reduce over the proton: 3x3 electron block trace.
  auto reduce = [](const Eigen::MatrixXcd& rho) {
    Eigen::Matrix3cd out = Eigen::Matrix3cd::Zero();
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j)
        out(i, j) = rho(2 * i, 2 * j) + rho(2 * i + 1, 2 * j + 1);
    return out;
  };

  const Eigen::Matrix3cd red0 = reduce(rho0);
  const double norm0 = (red0 * readout).trace().real();

  CoherenceSeries series;
  for (double tau : protocol.tau_grid) {
    Eigen::MatrixXcd rho = evolve_matrix(h, rho0, tau);
    rho = flip * rho * flip.adjoint();
    rho = evolve_matrix(h, rho, tau);
    const Eigen::Matrix3cd red = reduce(rho);
    series.two_tau.push_back(2.0 * tau);
    series.values.push_back((red * readout).trace().real() / norm0);
  }
  return series;
}

}  // namespace

CoherenceSeries hahn_echo(const hamiltonian::SystemHamiltonian& h,
                          const EchoProtocol& protocol, std::size_t central) {
  for (std::size_t i = 0; i + 1 < protocol.tau_grid.size(); ++i)
    if (!(protocol.tau_grid[i] < protocol.tau_grid[i + 1]))
      throw ConfigError("tau grid must be strictly ascending");
  if (!protocol.tau_grid.empty() && protocol.tau_grid.front() < 0.0)
    throw ConfigError("tau grid must be non-negative");

  CoherenceSeries series;
  if (protocol.targets == PulseTargets::ElectronOnly) {
    if (h.matrix.rows() != 6)
      throw EngineError(
          "electron-only pulses require the electron-proton system");
    series = hahn_echo_electron_proton(h, protocol);
  } else {
    series = hahn_echo_state(h, protocol, central);
  }
  series.meta["basis"] = h.basis;
  return series;
}

CoherenceSeries hahn_echo_density(const hamiltonian::SystemHamiltonian& h,
                                  const EchoProtocol& protocol,
                                  std::size_t central) {
  if (protocol.targets == PulseTargets::ElectronOnly)
    return hahn_echo(h, protocol, central);

  const Eigen::Index dim = h.matrix.rows();
  const std::size_t n = qubit_count(dim);
  const DensityMatrix rho0 = initial_state(n);
  const Eigen::MatrixXcd flip = pulse(Axis::X, std::numbers::pi, n);

  const DensityMatrix red0 = partial_trace(rho0, central);
  Eigen::Matrix2cd sx;
  sx << 0.0, 0.5, 0.5, 0.0;
  const double norm0 = (red0.matrix * sx).trace().real();

  CoherenceSeries series;
  for (double tau : protocol.tau_grid) {
    DensityMatrix rho = evolve(h, rho0, tau);
    rho.matrix = flip * rho.matrix * flip.adjoint();
    rho = evolve(h, rho, tau);
    const DensityMatrix red = partial_trace(rho, central);
    series.two_tau.push_back(2.0 * tau);
    series.values.push_back((red.matrix * sx).trace().real() / norm0);
  }
  series.meta["basis"] = h.basis;
  return series;
}

}  // namespace ctspin::echo
