#include "ctspin/hamiltonian.hpp"

#include <cmath>
#include <sstream>

#include "ctspin/errors.hpp"

namespace ctspin::hamiltonian {

namespace {
constexpr std::complex<double> I{0.0, 1.0};
}

SystemHamiltonian make_system(Eigen::MatrixXcd h, std::string basis) {
  SystemHamiltonian sys;
  sys.matrix = std::move(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sys.matrix);
  if (solver.info() != Eigen::Success)
    throw EngineError("eigendecomposition failed for basis " + basis);
  sys.eigenvalues = solver.eigenvalues();
  sys.eigenvectors = solver.eigenvectors();
  sys.basis = std::move(basis);
  return sys;
}

Eigen::Matrix3cd spin1_x() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 1) = s;
  m(1, 0) = s;
  m(1, 2) = s;
  m(2, 1) = s;
  return m;
}

Eigen::Matrix3cd spin1_y() {
  const std::complex<double> s = -I / std::sqrt(2.0);
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 1) = s;
  m(1, 0) = -s;
  m(1, 2) = s;
  m(2, 1) = -s;
  return m;
}

Eigen::Matrix3cd spin1_z() {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 0) = 1.0;
  m(2, 2) = -1.0;
  return m;
}

Eigen::Matrix3d dipolar_tensor(const Eigen::Vector3d& r_i,
                               const Eigen::Vector3d& r_j, double k) {
  const Eigen::Vector3d r = r_j - r_i;
  const double d = r.norm();
  if (d < lattice::duplicate_tolerance)
    throw ConfigError("dipolar tensor is singular for coincident positions");
  const Eigen::Vector3d u = r / d;
  return k * (3.0 * u * u.transpose() - Eigen::Matrix3d::Identity()) /
         (d * d * d);
}

double coupling_zz(const Eigen::Vector3d& r_i, const Eigen::Vector3d& r_j,
                   double k) {
  const Eigen::Vector3d r = r_j - r_i;
  const double d = r.norm();
  if (d < lattice::duplicate_tolerance)
    throw ConfigError("dipolar coupling is singular for coincident positions");
  const double cz = r.z() / d;
  return k * (3.0 * cz * cz - 1.0) / (d * d * d);
}

SystemHamiltonian build_single_s1(const QubitParams& params) {
  const Eigen::Matrix3cd sx = spin1_x(), sy = spin1_y(), sz = spin1_z();
  Eigen::Matrix3cd h =
      params.d * (sz * sz - (2.0 / 3.0) * Eigen::Matrix3cd::Identity()) +
      params.e * (sx * sx - sy * sy) + params.detuning() * sz;
  return make_system(std::move(h), "spin1-mz");
}

Eigen::Matrix2cd project_spin1_operator(const Eigen::Matrix3cd& op) {
  // Rows are <up| and <down| with |up/down> = (|+1> +- |-1>)/sqrt(2).
  Eigen::Matrix<std::complex<double>, 2, 3> p;
  const double s = 1.0 / std::sqrt(2.0);
  p << s, 0.0, s, s, 0.0, -s;
  return p * op * p.adjoint();
}

Eigen::Matrix2cd project_qubit(const QubitParams& params) {
  Eigen::Matrix2cd h = project_spin1_operator(build_single_s1(params).matrix);
  // The projected S=1 Hamiltonian carries a constant D/3 energy shift;
  // only the traceless part drives qubit dynamics.
  h -= 0.5 * h.trace() * Eigen::Matrix2cd::Identity();
  return h;
}

namespace {

double pair_coupling(const lattice::SpinConfiguration& config, std::size_t i,
                     std::size_t j, const CouplingModel& coupling) {
  if (coupling.fixed_jzz) return *coupling.fixed_jzz;
  return coupling.scale *
         coupling_zz(config.positions[i], config.positions[j]);
}

}  // namespace

SystemHamiltonian build_projected_n_spin(
    const lattice::SpinConfiguration& config, const QubitParams& params,
    const GapAssignment& gaps, const CouplingModel& coupling) {
  const std::size_t n = config.size();
  if (n < 1) throw ConfigError("empty spin configuration");
  if (n > 14) {
    std::ostringstream os;
    os << "projected Hamiltonian for " << n
       << " spins exceeds the dense-matrix guard (max 14)";
    throw ConfigError(os.str());
  }
  if (gaps.gaps.size() != n)
    throw ConfigError("gap assignment length does not match spin count");

  const std::size_t dim = std::size_t{1} << n;
  const double db = params.detuning();

  // Real symmetric in the product basis: sigma_z terms on the diagonal,
  // sigma_x and sigma_x sigma_x terms as bit flips.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  std::vector<std::size_t> mask(n);
  for (std::size_t i = 0; i < n; ++i)
    mask[i] = std::size_t{1} << (n - 1 - i);

  std::vector<double> jzz(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      jzz[i * n + j] = pair_coupling(config, i, j, coupling);

  for (std::size_t s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      diag += (s & mask[i]) ? -gaps.gaps[i] : gaps.gaps[i];
    h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = diag;

    if (db != 0.0)
      for (std::size_t i = 0; i < n; ++i)
        h(static_cast<Eigen::Index>(s ^ mask[i]),
          static_cast<Eigen::Index>(s)) += db;

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        h(static_cast<Eigen::Index>(s ^ mask[i] ^ mask[j]),
          static_cast<Eigen::Index>(s)) += jzz[i * n + j];
  }

  return make_system(h.cast<std::complex<double>>(), "projected-qubit");
}

SystemHamiltonian build_electron_proton(const QubitParams& params,
                                        const Eigen::Vector3d& r,
                                        bool full_tensor,
                                        const CouplingModel& coupling) {
  if (r.norm() < lattice::duplicate_tolerance)
    throw ConfigError("electron and proton positions coincide");

  const Eigen::Matrix3cd he = build_single_s1(params).matrix;
  const Eigen::Matrix2cd iz = 0.5 * (Eigen::Matrix2cd() << 1, 0, 0, -1)
                                        .finished()
                                        .cast<std::complex<double>>();
  const Eigen::Matrix2cd ix =
      0.5 * (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  const Eigen::Matrix2cd iy =
      0.5 * (Eigen::Matrix2cd() << 0.0, -1.0, 1.0, 0.0).finished() * I;

  const double k_ep = units::dipolar_constant(
      units::to_mhz(params.gamma_e), units::to_mhz(params.gamma_p()));

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(6, 6);
  auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
            a(i, j) * b;
    return out;
  };

  h += kron(he, Eigen::Matrix2cd::Identity());
  h += params.gamma_p() * params.b0_mt *
       kron(Eigen::Matrix3cd::Identity(), iz);

  if (coupling.fixed_jzz) {
    h += *coupling.fixed_jzz * kron(spin1_z(), iz);
  } else if (full_tensor) {
    const Eigen::Matrix3d j =
        coupling.scale * dipolar_tensor(Eigen::Vector3d::Zero(), r, k_ep);
    const std::array<Eigen::Matrix3cd, 3> s{spin1_x(), spin1_y(), spin1_z()};
    const std::array<Eigen::Matrix2cd, 3> p{ix, iy, iz};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        h += j(a, b) * kron(s[static_cast<std::size_t>(a)],
                            p[static_cast<std::size_t>(b)]);
  } else {
    const double jzz =
        coupling.scale * coupling_zz(Eigen::Vector3d::Zero(), r, k_ep);
    h += jzz * kron(spin1_z(), iz);
  }

  return make_system(std::move(h), "electron-proton");
}

}  // namespace ctspin::hamiltonian
