#include "seqmet/qubit.hpp"

#include <stdexcept>

namespace seqmet {

namespace {
const Complex I_UNIT(0.0, 1.0);
}

Matrix2c pauli_x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2c pauli_y() {
  Matrix2c m;
  m << 0, -I_UNIT, I_UNIT, 0;
  return m;
}

Matrix2c pauli_z() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix2c pauli_matrix(const Vec3& n) {
  Matrix2c m;
  m << n.z(), Complex(n.x(), -n.y()), Complex(n.x(), n.y()), -n.z();
  return m;
}

bool is_unitary(const Matrix2c& U, double eps) {
  return (U * U.adjoint() - Matrix2c::Identity()).cwiseAbs().maxCoeff() < eps;
}

bool is_hermitian(const Matrix2c& M, double eps) {
  return (M - M.adjoint()).cwiseAbs().maxCoeff() < eps;
}

Matrix2c su2_exp(const Vec3& axis, double angle) {
  return std::cos(angle) * Matrix2c::Identity() -
         I_UNIT * std::sin(angle) * pauli_matrix(axis);
}

PauliDecomposition pauli_decompose(const Matrix2c& M) {
  if (!is_hermitian(M, 1e-9)) {
    throw std::invalid_argument("pauli_decompose: matrix is not hermitian");
  }
  PauliDecomposition d;
  d.scalar = 0.5 * std::real(M(0, 0) + M(1, 1));
  d.bloch.x() = std::real(M(1, 0));
  d.bloch.y() = std::imag(M(1, 0));
  d.bloch.z() = 0.5 * std::real(M(0, 0) - M(1, 1));
  return d;
}

namespace {
// decomposition without the hermiticity gate, for internal conjugations
// whose inputs are hermitian by construction
PauliDecomposition decompose_unchecked(const Matrix2c& M) {
  PauliDecomposition d;
  d.scalar = 0.5 * std::real(M(0, 0) + M(1, 1));
  d.bloch.x() = std::real(M(1, 0));
  d.bloch.y() = std::imag(M(1, 0));
  d.bloch.z() = 0.5 * std::real(M(0, 0) - M(1, 1));
  return d;
}
}  // namespace

Vec3 adjoint_rotate(const Matrix2c& U, const Vec3& v) {
  return decompose_unchecked(U.adjoint() * pauli_matrix(v) * U).bloch;
}

AxisAngle su2_log(const Matrix2c& U) {
  // strip the global phase: U' = U / sqrt(det U) has det 1
  const Complex root = std::sqrt(U.determinant());
  const Matrix2c Up = U / root;

  AxisAngle r;
  r.angle = std::acos(clamp_unit(0.5 * std::real(Up.trace())));

  // i(U' - U'^dag)/2 = sin(angle) axis . sigma
  const Matrix2c sine_part = 0.5 * I_UNIT * (Up - Up.adjoint());
  const Vec3 sv = pauli_decompose(sine_part).bloch;
  const double sn = sv.norm();
  if (sn < 1e-12) {
    r.degenerate = true;
    return r;
  }
  r.axis = sv / sn;
  return r;
}

double alignment_phase(const Matrix2c& A, const Matrix2c& B) {
  const Complex overlap = (A.adjoint() * B).trace();
  if (std::abs(overlap) < 1e-14) return 0.0;
  return -std::arg(overlap);
}

double phase_distance(const Matrix2c& A, const Matrix2c& B) {
  const double phi = alignment_phase(A, B);
  return (A - std::exp(I_UNIT * phi) * B).norm();
}

Vec3 bloch_vector(const State2& psi) {
  const Complex cross = std::conj(psi(0)) * psi(1);
  return Vec3(2.0 * std::real(cross), 2.0 * std::imag(cross),
              std::norm(psi(0)) - std::norm(psi(1)));
}

State2 state_from_bloch(const Vec3& n) {
  const double theta = std::acos(clamp_unit(n.z()));
  const double phi = std::atan2(n.y(), n.x());
  State2 psi;
  psi << std::cos(0.5 * theta),
      std::exp(I_UNIT * phi) * std::sin(0.5 * theta);
  return psi;
}

}  // namespace seqmet
