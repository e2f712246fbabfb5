#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "ctspin/errors.hpp"
#include "ctspin/hamiltonian.hpp"
#include "ctspin/units.hpp"

using namespace ctspin;
using Eigen::MatrixXcd;

namespace {
double hermiticity_defect(const MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("spin-1 operators satisfy su(2)") {
  const auto sx = hamiltonian::spin1_x();
  const auto sy = hamiltonian::spin1_y();
  const auto sz = hamiltonian::spin1_z();
  const std::complex<double> I(0.0, 1.0);
  CHECK(((sx * sy - sy * sx) - I * sz).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(((sy * sz - sz * sy) - I * sx).cwiseAbs().maxCoeff() < 1e-14);
  // S(S+1) = 2 for S=1
  CHECK(((sx * sx + sy * sy + sz * sz) -
         2.0 * Eigen::Matrix3cd::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("single molecule levels at the field minimum") {
  hamiltonian::QubitParams p;  // defaults: D=-45 GHz, E=4.5 GHz, B=Bmin
  const auto sys = hamiltonian::build_single_s1(p);
  CHECK(hermiticity_defect(sys.matrix) < 1e-9);
  // eigenvalues: -D/3 +/- E and 2D/3 (the last is highest for D<0)
  CHECK(units::to_ghz(sys.eigenvalues[0]) == doctest::Approx(-19.5));
  CHECK(units::to_ghz(sys.eigenvalues[1]) == doctest::Approx(-10.5));
  CHECK(units::to_ghz(sys.eigenvalues[2]) == doctest::Approx(30.0));
}

TEST_CASE("qubit projection at the clock transition") {
  hamiltonian::QubitParams p;
  const Eigen::Matrix2cd q = hamiltonian::project_qubit(p);
  // pure E sigma_z at B0 = Bmin
  CHECK(std::abs(q(0, 0).real() - p.e) < 1e-9);
  CHECK(std::abs(q(1, 1).real() + p.e) < 1e-9);
  CHECK(std::abs(q(0, 1)) < 1e-12);
}

TEST_CASE("qubit projection away from the clock transition") {
  hamiltonian::QubitParams p;
  p.b0_mt = p.bmin_mt + 2.0;
  const Eigen::Matrix2cd q = hamiltonian::project_qubit(p);
  const double w = p.gamma_e * 2.0;  // detuning in rad/us
  CHECK(std::abs(q(0, 1).real() - w) < 1e-9);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(q);
  const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
  CHECK(gap == doctest::Approx(2.0 * std::sqrt(p.e * p.e + w * w)));
}

TEST_CASE("projection respects the operator dictionary") {
  const auto sx = hamiltonian::spin1_x();
  const auto sy = hamiltonian::spin1_y();
  const auto sz = hamiltonian::spin1_z();
  const Eigen::Matrix2cd I2 = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd sigz;
  sigz << 1, 0, 0, -1;
  Eigen::Matrix2cd sigx;
  sigx << 0, 1, 1, 0;

  CHECK((hamiltonian::project_spin1_operator(sz * sz) - I2)
            .cwiseAbs().maxCoeff() < 1e-14);
  CHECK((hamiltonian::project_spin1_operator(sx * sx - sy * sy) - sigz)
            .cwiseAbs().maxCoeff() < 1e-14);
  CHECK(hamiltonian::project_spin1_operator(sx).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(hamiltonian::project_spin1_operator(sy).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((hamiltonian::project_spin1_operator(sz) - sigx)
            .cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("dipolar zz coupling: angular dependence and magnitude") {
  const Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  // perpendicular pair at 10 A: -K/r^3
  const double j_perp = hamiltonian::coupling_zz(
      origin, Eigen::Vector3d(10.0, 0.0, 0.0));
  // parallel pair at 10 A: +2K/r^3
  const double j_par = hamiltonian::coupling_zz(
      origin, Eigen::Vector3d(0.0, 0.0, 10.0));
  CHECK(j_par == doctest::Approx(-2.0 * j_perp));
  // two electron moments 1 nm apart couple at 52.04 MHz
  CHECK(units::to_mhz(std::abs(j_perp)) ==
        doctest::Approx(52.04).epsilon(2e-3));
  // magic angle zero
  const double c = std::sqrt(1.0 / 3.0);
  const Eigen::Vector3d magic(10.0 * std::sqrt(1 - c * c), 0.0, 10.0 * c);
  CHECK(std::abs(hamiltonian::coupling_zz(origin, magic)) < 1e-9);
  CHECK_THROWS_AS(hamiltonian::coupling_zz(origin, origin), ConfigError);
}

TEST_CASE("n-spin Hamiltonian structure") {
  lattice::SpinConfiguration config;
  config.positions = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 10),
                      Eigen::Vector3d(10, 0, 0)};
  config.site_indices = {0, 1, 2};
  hamiltonian::QubitParams p;
  const auto gaps = hamiltonian::GapAssignment::uniform(p.e, 3);
  const auto sys = hamiltonian::build_projected_n_spin(config, p, gaps);
  REQUIRE(sys.matrix.rows() == 8);
  CHECK(hermiticity_defect(sys.matrix) < 1e-12);

  // diagonal carries sum of +/- gap terms; basis state 0 = all up
  CHECK(sys.matrix(0, 0).real() == doctest::Approx(3.0 * p.e));

  // spin i owns bit n-1-i, so states 1 = 0b001 and 2 = 0b010 differ in
  // bits 0,1 = spins 2,1 and must carry that pair's coupling
  const double j12 = hamiltonian::coupling_zz(config.positions[1],
                                              config.positions[2]);
  CHECK(sys.matrix(1, 2).real() == doctest::Approx(j12));
  // states 0b001 and 0b100 differ in spins 0,2
  const double j02 = hamiltonian::coupling_zz(config.positions[0],
                                              config.positions[2]);
  CHECK(sys.matrix(1, 4).real() == doctest::Approx(j02));
}

TEST_CASE("n-spin off-diagonal flip terms sit on xor-coupled pairs") {
  lattice::SpinConfiguration config;
  config.positions = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 12)};
  config.site_indices = {0, 1};
  hamiltonian::QubitParams p;
  const auto gaps = hamiltonian::GapAssignment::uniform(p.e, 2);
  const auto sys = hamiltonian::build_projected_n_spin(config, p, gaps);
  const double j = hamiltonian::coupling_zz(config.positions[0],
                                            config.positions[1]);
  // sigma_x sigma_x couples |00> with |11| and |01> with |10>
  CHECK(sys.matrix(0, 3).real() == doctest::Approx(j));
  CHECK(sys.matrix(1, 2).real() == doctest::Approx(j));
  CHECK(std::abs(sys.matrix(0, 1)) < 1e-15);
  CHECK(std::abs(sys.matrix(0, 2)) < 1e-15);
}

TEST_CASE("gap assignment length is enforced") {
  lattice::SpinConfiguration config;
  config.positions = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 10)};
  config.site_indices = {0, 1};
  hamiltonian::QubitParams p;
  const auto short_gaps = hamiltonian::GapAssignment::uniform(p.e, 1);
  CHECK_THROWS_AS(
      hamiltonian::build_projected_n_spin(config, p, short_gaps), ConfigError);
}

TEST_CASE("coupling overrides") {
  lattice::SpinConfiguration config;
  config.positions = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 10)};
  config.site_indices = {0, 1};
  hamiltonian::QubitParams p;
  const auto gaps = hamiltonian::GapAssignment::uniform(p.e, 2);

  hamiltonian::CouplingModel fixed;
  fixed.fixed_jzz = units::mhz(1.0);
  const auto sys = hamiltonian::build_projected_n_spin(config, p, gaps, fixed);
  CHECK(sys.matrix(0, 3).real() == doctest::Approx(units::mhz(1.0)));

  hamiltonian::CouplingModel scaled;
  scaled.scale = 0.0;
  const auto free_sys =
      hamiltonian::build_projected_n_spin(config, p, gaps, scaled);
  CHECK(std::abs(free_sys.matrix(0, 3)) < 1e-15);
}

TEST_CASE("electron-proton Hamiltonian is hermitian, 6-dim, and secular by default") {
  hamiltonian::QubitParams p;
  const Eigen::Vector3d r(0.0, 0.0, 5.0);
  const auto sec = hamiltonian::build_electron_proton(p, r, false);
  REQUIRE(sec.matrix.rows() == 6);
  CHECK(hermiticity_defect(sec.matrix) < 1e-9);
  const auto full = hamiltonian::build_electron_proton(p, r, true);
  CHECK(hermiticity_defect(full.matrix) < 1e-9);
  // the full tensor adds off-diagonal hyperfine structure
  CHECK((full.matrix - sec.matrix).cwiseAbs().maxCoeff() > 1e-6);
}
