#pragma once

#include <utility>
#include <vector>

#include "seqmet/generator.hpp"
#include "seqmet/protocol.hpp"

namespace seqmet {

// axis-angle form of one mismatched evolve-control block, plus the amplitude
// gain accumulated over `blocks` identical repetitions
struct MismatchGeometry {
  double angle = 0;           // block rotation half-angle, in [0, pi]
  Vec3 axis = Vec3::UnitZ();  // unit rotation axis; placeholder when degenerate
  double gain = 1;            // sin(blocks * angle) / sin(angle)
  bool degenerate = false;    // angle within tolerance of 0 or pi
};

// sin(N a)/sin(a) with the removable singularity filled: -> N at a = 0 and
// (-1)^(N-1) N at a = pi, evaluated by Chebyshev recurrence near those points
double mismatch_gain(double angle, int blocks);

// geometry of U_t(xhat)^dag U_t(x) for the plate plant; agrees with the
// axis-angle log of the explicit matrix product
MismatchGeometry mismatch_geometry(double t, double x, double xhat,
                                   int blocks = 1);

// closed-form detection probability: probe tilted by alpha off the field
// direction at xhat, `blocks` rounds of evolve-at-x then control, projected
// onto the analyzer tilted by alpha - pi/2
double outcome_probability(double x, double xhat, double t, int blocks,
                           double alpha);

// fringe pair ((1 + cos 4Nx)/2, (1 - cos 4Nx)/2) of the pre-fixed protocol
// that probes and measures along the field direction at the working point
std::pair<double, double> sweet_spot_probability(double x, int blocks);

// state-vector reference for the same sequence with a free analyzer tilt beta
double simulate_outcome_probability(double x, double xhat, double t,
                                    int blocks, double alpha, double beta);

// detection probability of a prepared protocol when the plant sits at x
double model_probability(double x, const ProtocolConfig& pc);

struct CfiResult {
  double value = 0;
  bool saturated = false;  // probability pinned at 0 or 1 within the guard
};

// Fisher information of the binary outcome as x varies; analytic derivative
// at alpha = 0, central difference otherwise
CfiResult cfi_two_outcome(double x, double xhat, double t, int blocks,
                          double alpha);

// 4 x variance of the generator in the given pure probe state
double qfi_from_generator(const GeneratorState& g, const State2& probe);

// 16 N^2 sin^2(T/N), the N-block controlled sequence at its best probe
double qfi_controlled_closed(int blocks, double total_time);

struct FisherPoint {
  double x = 0;
  double total_time = 0;
  int blocks = 1;
  double qfi = 0;
  double cfi = 0;
  double p_plus = 0.5;
};

// dense table over strictly increasing grids, row-major with x outermost;
// probe and analyzer fixed at alpha = 0 for the working point xhat
std::vector<FisherPoint> fisher_landscape(const std::vector<double>& xs,
                                          const std::vector<double>& Ts,
                                          int blocks, double xhat);

}  // namespace seqmet
