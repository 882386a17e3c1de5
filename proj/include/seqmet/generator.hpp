#pragma once

#include <functional>

#include "seqmet/qubit.hpp"

namespace seqmet {

// parameter-indexed qubit Hamiltonian x -> field(x) . sigma
struct HamiltonianFamily {
  std::function<Vec3(double)> field;       // h(x)
  std::function<Vec3(double)> derivative;  // dh/dx
};

// birefringent-plate plant: h(x) = (sin 2x, 0, cos 2x), unit field strength
HamiltonianFamily plate_hamiltonian();

// U_t(x) = exp(-i t field(x) . sigma)
Matrix2c evolution(const HamiltonianFamily& fam, double x, double t);

// v(t) with U_t (dh/dx . sigma) U_t^dag = v(t) . sigma, at fixed x
Vec3 instantaneous_signal(const HamiltonianFamily& fam, double x, double t);

// local generator of a parametrized unitary family, i (dU/dx) U^dag,
// expanded as scalar I + bloch . sigma
struct GeneratorState {
  Vec3 bloch = Vec3::Zero();
  double scalar = 0;
  double time = 0;   // total evolution time folded in
  int blocks = 1;    // identical repetitions folded in
};

// generator of x -> U_T(x) for uninterrupted evolution, in closed form
GeneratorState free_generator(const HamiltonianFamily& fam, double x, double T);

// generator of N repetitions [evolve T/N, apply the control matched to x],
// evaluated at the matched point: N times the single-block free generator
GeneratorState controlled_generator(const HamiltonianFamily& fam, double x,
                                    double T, int blocks);

// generator of the N-block controlled sequence with the control matched to
// xhat while the plant sits at x, referred to the input-state frame
GeneratorState sequence_generator(const HamiltonianFamily& fam, double x,
                                  double xhat, double T, int blocks);

// central-difference generator of an arbitrary unitary family at x
GeneratorState numerical_generator(const std::function<Matrix2c(double)>& U,
                                   double x, double dx = 1e-6);

// squared norm of the free generator's Bloch vector from the independent
// closed form (v0 . nh)^2 T^2 + |v0_perp|^2 sin^2(|h|T)/|h|^2
double generator_norm_sq(const HamiltonianFamily& fam, double x, double T);

// variance of bloch . sigma in the pure state with Bloch vector `probe`
double generator_variance(const GeneratorState& g, const Vec3& probe);

}  // namespace seqmet
