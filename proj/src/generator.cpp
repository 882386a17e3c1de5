#include "seqmet/generator.hpp"

#include <stdexcept>

namespace seqmet {

namespace {
const Complex I_UNIT(0.0, 1.0);
constexpr double FIELD_FLOOR = 1e-14;
}

HamiltonianFamily plate_hamiltonian() {
  HamiltonianFamily fam;
  fam.field = [](double x) {
    return Vec3(std::sin(2 * x), 0.0, std::cos(2 * x));
  };
  fam.derivative = [](double x) {
    return Vec3(2 * std::cos(2 * x), 0.0, -2 * std::sin(2 * x));
  };
  return fam;
}

Matrix2c evolution(const HamiltonianFamily& fam, double x, double t) {
  const Vec3 h = fam.field(x);
  const double hn = h.norm();
  if (hn < FIELD_FLOOR) return Matrix2c::Identity();
  return su2_exp(h / hn, hn * t);
}

Vec3 instantaneous_signal(const HamiltonianFamily& fam, double x, double t) {
  return adjoint_rotate(evolution(fam, x, t).adjoint(), fam.derivative(x));
}

GeneratorState free_generator(const HamiltonianFamily& fam, double x,
                              double T) {
  const Vec3 h = fam.field(x);
  const Vec3 v0 = fam.derivative(x);
  GeneratorState g;
  g.time = T;
  g.blocks = 1;

  const double hn = h.norm();
  if (hn < FIELD_FLOOR) {
    g.bloch = v0 * T;  // no precession, the signal just accumulates
    return g;
  }

  const Vec3 nh = h / hn;
  const double v_par = v0.dot(nh);
  const Vec3 v_perp = v0 - v_par * nh;
  const double vp = v_perp.norm();

  g.bloch = v_par * T * nh;
  if (vp > FIELD_FLOOR * (1.0 + v0.norm())) {
    const Vec3 n1 = v_perp / vp;
    const Vec3 n2 = nh.cross(n1);
    const double w = 2 * hn;  // precession rate of the signal about nh
    g.bloch += vp * T * (sinc(w * T) * n1 + cosc(w * T) * n2);
  }
  return g;
}

GeneratorState controlled_generator(const HamiltonianFamily& fam, double x,
                                    double T, int blocks) {
  if (blocks < 1) {
    throw std::invalid_argument("controlled_generator: blocks must be >= 1");
  }
  GeneratorState g = free_generator(fam, x, T / blocks);
  g.bloch *= blocks;
  g.scalar *= blocks;
  g.time = T;
  g.blocks = blocks;
  return g;
}

GeneratorState sequence_generator(const HamiltonianFamily& fam, double x,
                                  double xhat, double T, int blocks) {
  if (blocks < 1) {
    throw std::invalid_argument("sequence_generator: blocks must be >= 1");
  }
  const double t = T / blocks;
  const Matrix2c Uc = evolution(fam, xhat, t).adjoint();
  const Matrix2c W = Uc * evolution(fam, x, t);

  const GeneratorState single = free_generator(fam, x, t);
  // Bloch vector of U_c S_t U_c^dag
  const Vec3 core = adjoint_rotate(Uc.adjoint(), single.bloch);

  // sum of W^-m (core . sigma) W^m over the block index m
  GeneratorState g;
  g.time = T;
  g.blocks = blocks;
  Matrix2c Wm = Matrix2c::Identity();
  for (int m = 0; m < blocks; ++m) {
    Wm = W * Wm;
    g.bloch += adjoint_rotate(Wm, core);
  }
  return g;
}

GeneratorState numerical_generator(const std::function<Matrix2c(double)>& U,
                                   double x, double dx) {
  if (!(dx > 0)) {
    throw std::invalid_argument("numerical_generator: dx must be positive");
  }
  const Matrix2c dU = (U(x + dx) - U(x - dx)) / (2 * dx);
  const Matrix2c M = I_UNIT * dU * U(x).adjoint();
  const Matrix2c herm = 0.5 * (M + M.adjoint());
  const PauliDecomposition d = pauli_decompose(herm);
  GeneratorState g;
  g.bloch = d.bloch;
  g.scalar = d.scalar;
  return g;
}

double generator_norm_sq(const HamiltonianFamily& fam, double x, double T) {
  const Vec3 h = fam.field(x);
  const Vec3 v0 = fam.derivative(x);
  const double hn = h.norm();
  if (hn < FIELD_FLOOR) return v0.squaredNorm() * T * T;
  const double v_par = v0.dot(h) / hn;
  const double perp_sq = v0.squaredNorm() - v_par * v_par;
  const double s = sinc(hn * T);  // sin(|h|T)/|h| = T sinc(|h|T)
  return v_par * v_par * T * T + perp_sq * T * T * s * s;
}

double generator_variance(const GeneratorState& g, const Vec3& probe) {
  const double mean = g.bloch.dot(probe);
  return g.bloch.squaredNorm() - mean * mean;
}

}  // namespace seqmet
