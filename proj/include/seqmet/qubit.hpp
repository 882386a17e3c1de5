#pragma once

#include <Eigen/Dense>
#include <complex>

#include "seqmet/numeric.hpp"

namespace seqmet {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;
using State2 = Eigen::Vector2cd;

Matrix2c pauli_x();
Matrix2c pauli_y();
Matrix2c pauli_z();

// n . sigma for an arbitrary real vector n
Matrix2c pauli_matrix(const Vec3& n);

bool is_unitary(const Matrix2c& U, double eps = tol::unitary);
bool is_hermitian(const Matrix2c& M, double eps = tol::unitary);

// exp(-i angle (axis . sigma)); axis must be unit length
Matrix2c su2_exp(const Vec3& axis, double angle);

struct PauliDecomposition {
  double scalar = 0;          // identity coefficient
  Vec3 bloch = Vec3::Zero();  // (sigma1, sigma2, sigma3) coefficients
};

// unique expansion M = scalar I + bloch . sigma of a Hermitian matrix;
// throws std::invalid_argument when M is not hermitian
PauliDecomposition pauli_decompose(const Matrix2c& M);

// w such that U^dag (v . sigma) U = w . sigma: the axis measured along v
// after the state went through U. Composition folds right to left:
// adjoint_rotate(U1 U2, v) = adjoint_rotate(U2, adjoint_rotate(U1, v)).
// For the Schrodinger-picture rotation of a state's Bloch vector under U,
// call adjoint_rotate(U.adjoint(), v).
Vec3 adjoint_rotate(const Matrix2c& U, const Vec3& v);

struct AxisAngle {
  double angle = 0;  // in [0, pi]
  Vec3 axis = Vec3::UnitZ();
  bool degenerate = false;  // axis unresolvable: rotation is (close to) I or -I
};

// inverse of su2_exp up to global phase
AxisAngle su2_log(const Matrix2c& U);

// phase phi minimizing the Frobenius distance ||A - e^{i phi} B||; 0 if the
// overlap tr(A^dag B) vanishes
double alignment_phase(const Matrix2c& A, const Matrix2c& B);

// min over phi of ||A - e^{i phi} B||_F
double phase_distance(const Matrix2c& A, const Matrix2c& B);

// expectation values <psi| sigma |psi>
Vec3 bloch_vector(const State2& psi);

// pure state with the given unit Bloch vector, real nonnegative first entry
State2 state_from_bloch(const Vec3& n);

}  // namespace seqmet
