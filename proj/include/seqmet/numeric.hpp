#pragma once

#include <cmath>
#include <cstdint>

namespace seqmet {

// shared tolerances; named by what they gate
namespace tol {
inline constexpr double unitary = 1e-12;     // unitarity / hermiticity residuals
inline constexpr double compare = 1e-10;     // closed form vs independent oracle
inline constexpr double axis = 1e-9;         // axis recovery near degeneracies
inline constexpr double prob_guard = 1e-12;  // probability clamp in likelihoods
}  // namespace tol

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double half_pi = pi / 2;
inline constexpr double two_pi = 2 * pi;

// sin(z)/z with the removable singularity filled in
inline double sinc(double z) {
  if (std::abs(z) < 1e-4) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0);
  }
  return std::sin(z) / z;
}

// (1 - cos(z))/z with the removable singularity filled in
inline double cosc(double z) {
  if (std::abs(z) < 1e-4) {
    const double z2 = z * z;
    return z / 2.0 * (1.0 - z2 / 12.0 * (1.0 - z2 / 30.0));
  }
  return (1.0 - std::cos(z)) / z;
}

inline double clamp_unit(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace seqmet
