#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "seqmet/protocol.hpp"

using namespace seqmet;

namespace {

std::mt19937_64 rng(90210);

double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double mdist(const Matrix2c& A, const Matrix2c& B) {
  return (A - B).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("frames are orthonormal and right-handed") {
  for (int i = 0; i < 15; ++i) {
    const double x = uniform(-2, 2), t = uniform(-3, 3);
    const Vec3 h = frame_h(x), f1 = frame_1(x), f2 = frame_2();
    CHECK(std::abs(h.norm() - 1) < 1e-14);
    CHECK(std::abs(f1.norm() - 1) < 1e-14);
    CHECK(std::abs(h.dot(f1)) < 1e-14);
    CHECK((h.cross(f1) - f2).norm() < 1e-14);
    const Vec3 f3 = frame_3(x, t), fu = frame_uprime(x, t);
    CHECK(std::abs(f3.norm() - 1) < 1e-14);
    CHECK(std::abs(f3.dot(h)) < 1e-14);
    CHECK(std::abs(f3.dot(fu)) < 1e-14);
    CHECK(std::abs(f3.dot(f1) - std::sin(t)) < 1e-14);
  }
}

TEST_CASE("frame_3 is orthogonal to the input-frame block generator") {
  const HamiltonianFamily fam = plate_hamiltonian();
  for (int i = 0; i < 15; ++i) {
    const double x = uniform(-1.5, 1.5), t = uniform(0.1, 3.0);
    const GeneratorState g = free_generator(fam, x, t);
    const Vec3 s_in = adjoint_rotate(evolution(fam, x, t), g.bloch);
    CHECK(std::abs(frame_3(x, t).dot(s_in)) < 1e-12);
    // the generator also has no component along the field
    CHECK(std::abs(frame_h(x).dot(s_in)) < 1e-12);
  }
}

TEST_CASE("build_protocol: unit axes, matched control undoes one block") {
  const HamiltonianFamily fam = plate_hamiltonian();
  for (int i = 0; i < 15; ++i) {
    const double xhat = uniform(-1.5, 1.5), t = uniform(0.1, 3.0);
    const double alpha = uniform(-1, 1), beta = uniform(-2, 2);
    const ProtocolConfig c = build_protocol(xhat, 4, t, alpha, beta);
    CHECK(std::abs(c.probe_bloch.norm() - 1) < 1e-14);
    CHECK((bloch_vector(c.probe) - c.probe_bloch).norm() < 1e-13);
    CHECK(std::abs(c.meas_axis.norm() - 1) < 1e-14);
    CHECK(is_unitary(c.control));
    CHECK(mdist(c.control * evolution(fam, xhat, t), Matrix2c::Identity()) <
          1e-14);
    CHECK(std::abs(c.probe_bloch.dot(frame_h(xhat)) - std::cos(alpha)) <
          1e-13);
    // probe and measurement axis live in the plane orthogonal to the
    // complementary direction
    const Vec3 fu = frame_uprime(xhat, t);
    CHECK(std::abs(c.probe_bloch.dot(fu)) < 1e-10);
    CHECK(std::abs(c.meas_axis.dot(fu)) < 1e-10);
  }
}

TEST_CASE("probe tilt at t = pi/2, working point 0, spans the x-z plane") {
  for (double alpha : {-0.7, 0.0, 0.4, 1.2}) {
    const ProtocolConfig c = build_protocol(0.0, 1, half_pi, alpha, half_pi);
    CHECK((c.probe_bloch - Vec3(std::sin(alpha), 0, std::cos(alpha))).norm() <
          1e-13);
  }
}

TEST_CASE("sweet_spot_protocol pinned values") {
  const HamiltonianFamily fam = plate_hamiltonian();
  const ProtocolConfig c = sweet_spot_protocol(4);
  CHECK(c.blocks == 4);
  CHECK((c.probe_bloch - Vec3(0, 0, 1)).norm() < 1e-14);
  CHECK((c.meas_axis - Vec3(1, 0, 0)).norm() < 1e-14);
  Matrix2c iz = Matrix2c::Zero();
  iz(0, 0) = Complex(0, 1);
  iz(1, 1) = Complex(0, -1);
  CHECK(mdist(c.control, iz) < 1e-15);  // i sigma3 exactly

  // combined block is a pure sigma2 rotation: U_c U_t(x) = exp(i 2x sigma2),
  // so it commutes with sigma2 for every x
  std::mt19937_64 local(7);
  for (int i = 0; i < 20; ++i) {
    const double x =
        std::uniform_real_distribution<double>(-half_pi, half_pi)(local);
    const Matrix2c block = c.control * evolution(fam, x, half_pi);
    const Matrix2c target = su2_exp(Vec3(0, 1, 0), -2 * x);
    CHECK(phase_distance(block, target) < 1e-13);
    CHECK(mdist(block * pauli_y(), pauli_y() * block) < 1e-13);
  }
}

TEST_CASE("jones matrices: unitarity, axial forms, plate algebra") {
  CHECK(mdist(jones_hwp(0), pauli_z()) < 1e-15);
  Matrix2c q0 = Matrix2c::Zero();
  q0(0, 0) = 1;
  q0(1, 1) = Complex(0, 1);
  CHECK(mdist(jones_qwp(0), q0) < 1e-15);
  for (int i = 0; i < 10; ++i) {
    const double th = uniform(-2, 2);
    CHECK(is_unitary(jones_hwp(th), 1e-14));
    CHECK(is_unitary(jones_qwp(th), 1e-14));
    // half-wave: involution; quarter-wave squared: half-wave
    CHECK(mdist(jones_hwp(th) * jones_hwp(th), Matrix2c::Identity()) < 1e-14);
    CHECK(mdist(jones_qwp(th) * jones_qwp(th), jones_hwp(th)) < 1e-14);
    // pi-periodic mounts
    CHECK(mdist(jones_hwp(th + pi), jones_hwp(th)) < 1e-14);
    CHECK(mdist(jones_qwp(th + pi), jones_qwp(th)) < 1e-14);
  }
  // crossed mount is the plate rotated a quarter turn
  CHECK(mdist(jones_qwp_crossed(0.3), jones_qwp(0.3 + half_pi)) < 1e-15);
}

TEST_CASE("half-wave plate doubles as the plant Hamiltonian") {
  for (double x : {-0.9, 0.0, 0.7}) {
    CHECK(mdist(jones_hwp(x), pauli_matrix(frame_h(x))) < 1e-14);
  }
}

TEST_CASE("normalize_plate_angle lands in (-pi/2, pi/2] and is neutral") {
  for (int i = 0; i < 40; ++i) {
    const double a = uniform(-20, 20);
    const double r = normalize_plate_angle(a);
    CHECK(r > -half_pi);
    CHECK(r <= half_pi + 1e-15);
    CHECK(mdist(jones_hwp(r), jones_hwp(a)) < 1e-13);
    CHECK(mdist(jones_qwp(r), jones_qwp(a)) < 1e-13);
  }
  CHECK(normalize_plate_angle(-half_pi) == doctest::Approx(half_pi));
}

TEST_CASE("control stack at the origin is the quarter-turn about z") {
  // qwp(pi/4) hwp(-pi/2) qwp(pi/4) realizes i sigma3 up to phase
  const Matrix2c stack =
      jones_qwp(pi / 4) * jones_hwp(-half_pi) * jones_qwp(pi / 4);
  Matrix2c iz = Matrix2c::Zero();
  iz(0, 0) = Complex(0, 1);
  iz(1, 1) = Complex(0, -1);
  CHECK(phase_distance(stack, iz) < 1e-14);
}

TEST_CASE("waveplate settings realize all three stacks exactly") {
  for (int i = 0; i < 60; ++i) {
    const double xhat = uniform(-half_pi, half_pi);
    const double t = uniform(0.05, pi - 0.05);
    const WaveplateCheck c = verify_waveplate_settings(xhat, t);
    CHECK(c.preparation_error < 1e-12);
    CHECK(c.control_error < 1e-12);
    CHECK(c.measurement_error < 1e-12);
  }
}

TEST_CASE("plain final quarter-wave plate only closes the map at t = pi/2") {
  const double xhat = 0.35;
  const auto mapped_plain = [&](double t) {
    const WaveplateSettings s = waveplate_settings(xhat, t);
    const Matrix2c plain = jones_hwp(s.hwp3) * jones_qwp(s.qwp4);
    return (adjoint_rotate(plain.adjoint(), frame_3(xhat, t)) - Vec3::UnitZ())
        .norm();
  };
  CHECK(mapped_plain(half_pi) < 1e-12);
  CHECK(mapped_plain(1.0) > 0.1);
}

TEST_CASE("preparation stack output state, not just its Bloch vector") {
  for (int i = 0; i < 20; ++i) {
    const double xhat = uniform(-half_pi, half_pi);
    const WaveplateSettings s = waveplate_settings(xhat, 1.0);
    const State2 out = preparation_stack(s) * State2(1.0, 0.0);
    State2 target;
    target << std::cos(xhat), std::sin(xhat);
    // agreement up to a global phase
    CHECK(std::abs(std::abs(target.dot(out.conjugate())) - 1.0) < 1e-13);
  }
}
