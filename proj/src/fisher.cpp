#include "seqmet/fisher.hpp"

#include <algorithm>
#include <stdexcept>

namespace seqmet {

namespace {

// Bloch rotation of r under exp(-i theta n.sigma): right-handed by 2 theta
Vec3 rodrigues(const Vec3& n, double two_theta, const Vec3& r) {
  const double c = std::cos(two_theta);
  const double s = std::sin(two_theta);
  return r * c + n.cross(r) * s + n * (n.dot(r)) * (1.0 - c);
}

void require_blocks(int blocks, const char* who) {
  if (blocks < 1) {
    throw std::invalid_argument(std::string(who) + ": blocks must be >= 1");
  }
}

}  // namespace

double mismatch_gain(double angle, int blocks) {
  require_blocks(blocks, "mismatch_gain");
  const double s = std::sin(angle);
  if (std::abs(s) >= 1e-6) return std::sin(blocks * angle) / s;
  if (blocks == 1) return 1.0;
  // Chebyshev recurrence for U_{blocks-1}(cos angle)
  const double c = std::cos(angle);
  double prev = 1.0;      // U_0
  double cur = 2.0 * c;   // U_1
  for (int k = 2; k < blocks; ++k) {
    const double next = 2.0 * c * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

MismatchGeometry mismatch_geometry(double t, double x, double xhat,
                                   int blocks) {
  require_blocks(blocks, "mismatch_geometry");
  const double st = std::sin(t);
  const double ct = std::cos(t);
  const Vec3 hx = frame_h(x);
  const Vec3 hh = frame_h(xhat);
  const double cos_angle = ct * ct + hx.dot(hh) * st * st;
  const Vec3 sine_axis = st * ct * (hx - hh) + st * st * hx.cross(hh);
  const double sn = sine_axis.norm();

  MismatchGeometry g;
  g.angle = std::atan2(sn, cos_angle);
  g.gain = mismatch_gain(g.angle, blocks);
  if (sn < tol::unitary) {
    g.degenerate = true;
  } else {
    g.axis = sine_axis / sn;
  }
  return g;
}

double outcome_probability(double x, double xhat, double t, int blocks,
                           double alpha) {
  require_blocks(blocks, "outcome_probability");
  const MismatchGeometry g = mismatch_geometry(t, x, xhat, blocks);
  const double delta = x - xhat;
  const double s2d = std::sin(2.0 * delta);
  const double c2d = std::cos(2.0 * delta);
  const double st = std::sin(t);
  const double s2t = std::sin(2.0 * t);
  const double a = g.gain;
  const double dip = c2d - 1.0;
  const double p = 0.5 +
                   (a * a / 8.0) * std::sin(2.0 * alpha) * s2t * s2t * dip * dip +
                   a * st * s2d * std::cos(blocks * g.angle);
  // analytically in [0, 1]; trim floating residue only
  return std::min(1.0, std::max(0.0, p));
}

std::pair<double, double> sweet_spot_probability(double x, int blocks) {
  require_blocks(blocks, "sweet_spot_probability");
  const double c = std::cos(4.0 * blocks * x);
  return {0.5 * (1.0 + c), 0.5 * (1.0 - c)};
}

double simulate_outcome_probability(double x, double xhat, double t,
                                    int blocks, double alpha, double beta) {
  const ProtocolConfig pc = build_protocol(xhat, blocks, t, alpha, beta);
  const Matrix2c W = pc.control * evolution(plate_hamiltonian(), x, t);
  State2 psi = pc.probe;
  for (int m = 0; m < blocks; ++m) psi = W * psi;
  return 0.5 * (1.0 + pc.meas_axis.dot(bloch_vector(psi)));
}

double model_probability(double x, const ProtocolConfig& pc) {
  const Matrix2c W = pc.control * evolution(plate_hamiltonian(), x, pc.t);
  const AxisAngle aa = su2_log(W);
  Vec3 r = pc.probe_bloch;
  if (!aa.degenerate) {
    r = rodrigues(aa.axis, 2.0 * pc.blocks * aa.angle, r);
  }
  return 0.5 * (1.0 + pc.meas_axis.dot(r));
}

CfiResult cfi_two_outcome(double x, double xhat, double t, int blocks,
                          double alpha) {
  require_blocks(blocks, "cfi_two_outcome");

  const auto slope = [&](double xq) {
    if (alpha == 0.0) {
      // p = 1/2 + (1/2) sin t sin 2d U_{2N-1}(c),  c = cos^2 t + cos 2d sin^2 t
      const double delta = xq - xhat;
      const double st = std::sin(t);
      const double c2d = std::cos(2.0 * delta);
      const double s2d = std::sin(2.0 * delta);
      const double c = std::cos(t) * std::cos(t) + c2d * st * st;
      double u_prev = 1.0, u_cur = 2.0 * c;  // U_0, U_1
      double d_prev = 0.0, d_cur = 2.0;      // their derivatives in c
      for (int k = 1; k < 2 * blocks - 1; ++k) {
        const double u_next = 2.0 * c * u_cur - u_prev;
        const double d_next = 2.0 * u_cur + 2.0 * c * d_cur - d_prev;
        u_prev = u_cur;
        u_cur = u_next;
        d_prev = d_cur;
        d_cur = d_next;
      }
      return st * (c2d * u_cur - s2d * s2d * st * st * d_cur);
    }
    const double dx = 1e-6;
    return (outcome_probability(xq + dx, xhat, t, blocks, alpha) -
            outcome_probability(xq - dx, xhat, t, blocks, alpha)) /
           (2.0 * dx);
  };

  const double eps = tol::prob_guard;
  const auto regular = [&](double xq) {
    const double pq = outcome_probability(xq, xhat, t, blocks, alpha);
    const double den = pq * (1.0 - pq);
    if (den <= eps) return 0.0;
    const double dq = slope(xq);
    return dq * dq / den;
  };

  const double p = outcome_probability(x, xhat, t, blocks, alpha);
  if (p > eps && p < 1.0 - eps) {
    const double dp = slope(x);
    return {dp * dp / (p * (1.0 - p)), false};
  }
  // boundary contact: the slope vanishes together with p(1-p), but the rare
  // outcome keeps a finite information weight; report the two-sided limit
  const double h = 1e-4;
  return {0.5 * (regular(x - h) + regular(x + h)), true};
}

double qfi_from_generator(const GeneratorState& g, const State2& probe) {
  return 4.0 * generator_variance(g, bloch_vector(probe.normalized()));
}

double qfi_controlled_closed(int blocks, double total_time) {
  const double s = std::sin(total_time / blocks);
  return 16.0 * blocks * blocks * s * s;
}

std::vector<FisherPoint> fisher_landscape(const std::vector<double>& xs,
                                          const std::vector<double>& Ts,
                                          int blocks, double xhat) {
  require_blocks(blocks, "fisher_landscape");
  const auto check_grid = [](const std::vector<double>& g, const char* name) {
    if (g.empty()) {
      throw std::invalid_argument(std::string("fisher_landscape: empty ") +
                                  name + " grid");
    }
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (!(g[i] > g[i - 1])) {
        throw std::invalid_argument(
            std::string("fisher_landscape: non-increasing ") + name + " grid");
      }
    }
  };
  check_grid(xs, "x");
  check_grid(Ts, "T");

  const HamiltonianFamily fam = plate_hamiltonian();
  const Vec3 probe = frame_h(xhat);  // alpha = 0 probe, input frame
  std::vector<FisherPoint> out;
  out.reserve(xs.size() * Ts.size());
  for (const double x : xs) {
    for (const double T : Ts) {
      FisherPoint p;
      p.x = x;
      p.total_time = T;
      p.blocks = blocks;
      const GeneratorState g = sequence_generator(fam, x, xhat, T, blocks);
      p.qfi = 4.0 * generator_variance(g, probe);
      p.cfi = cfi_two_outcome(x, xhat, T / blocks, blocks, 0.0).value;
      p.p_plus = outcome_probability(x, xhat, T / blocks, blocks, 0.0);
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace seqmet
