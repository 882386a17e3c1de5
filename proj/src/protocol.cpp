#include "seqmet/protocol.hpp"

namespace seqmet {

namespace {
const Complex I_UNIT(0.0, 1.0);
}

Vec3 frame_h(double x) { return Vec3(std::sin(2 * x), 0.0, std::cos(2 * x)); }

Vec3 frame_1(double x) { return Vec3(std::cos(2 * x), 0.0, -std::sin(2 * x)); }

Vec3 frame_2() { return Vec3(0.0, 1.0, 0.0); }

Vec3 frame_3(double x, double t) {
  return std::sin(t) * frame_1(x) + std::cos(t) * frame_2();
}

Vec3 frame_uprime(double x, double t) {
  return std::cos(t) * frame_1(x) - std::sin(t) * frame_2();
}

ProtocolConfig build_protocol(double xhat, int blocks, double t, double alpha,
                              double beta) {
  ProtocolConfig c;
  c.xhat = xhat;
  c.blocks = blocks;
  c.t = t;
  c.alpha = alpha;
  c.beta = beta;
  const Vec3 h = frame_h(xhat);
  const Vec3 f3 = frame_3(xhat, t);
  c.probe_bloch = std::cos(alpha) * h + std::sin(alpha) * f3;
  c.probe = state_from_bloch(c.probe_bloch);
  c.meas_axis = std::cos(beta) * h + std::sin(beta) * f3;
  c.control = su2_exp(h, -t);  // inverse of one matched evolution block
  return c;
}

ProtocolConfig sweet_spot_protocol(int blocks) {
  return build_protocol(0.0, blocks, half_pi, 0.0, half_pi);
}

double normalize_plate_angle(double a) {
  double r = std::remainder(a, pi);
  if (r <= -half_pi) r += pi;
  return r;
}

WaveplateSettings waveplate_settings(double xhat, double t) {
  WaveplateSettings s;
  s.hwp1 = normalize_plate_angle(xhat / 2);
  s.qwp1 = normalize_plate_angle(xhat);
  s.qwp2 = normalize_plate_angle(xhat + pi / 4);
  s.hwp2 = normalize_plate_angle(xhat - t / 2 - pi / 4);
  s.qwp3 = normalize_plate_angle(xhat + pi / 4);
  s.hwp3 = normalize_plate_angle(xhat / 2 - t / 4 + pi / 4);
  s.qwp4 = normalize_plate_angle(xhat + pi / 4);
  return s;
}

Matrix2c jones_rotation(double theta) {
  Matrix2c m;
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return m;
}

Matrix2c jones_hwp(double theta) {
  Matrix2c d = Matrix2c::Zero();
  d(0, 0) = 1;
  d(1, 1) = -1;
  return jones_rotation(theta) * d * jones_rotation(-theta);
}

Matrix2c jones_qwp(double theta) {
  Matrix2c d = Matrix2c::Zero();
  d(0, 0) = 1;
  d(1, 1) = I_UNIT;
  return jones_rotation(theta) * d * jones_rotation(-theta);
}

Matrix2c jones_qwp_crossed(double theta) {
  return jones_qwp(theta + half_pi);
}

Matrix2c preparation_stack(const WaveplateSettings& s) {
  return jones_qwp(s.qwp1) * jones_hwp(s.hwp1);
}

Matrix2c control_stack(const WaveplateSettings& s) {
  return jones_qwp(s.qwp3) * jones_hwp(s.hwp2) * jones_qwp(s.qwp2);
}

Matrix2c measurement_stack(const WaveplateSettings& s) {
  return jones_hwp(s.hwp3) * jones_qwp_crossed(s.qwp4);
}

WaveplateCheck verify_waveplate_settings(double xhat, double t) {
  const WaveplateSettings s = waveplate_settings(xhat, t);
  WaveplateCheck c;

  const State2 horizontal(1.0, 0.0);
  const State2 prepared = preparation_stack(s) * horizontal;
  c.preparation_error = (bloch_vector(prepared) - frame_h(xhat)).norm();

  const Matrix2c control_target = su2_exp(frame_h(xhat), -t);
  c.control_error = phase_distance(control_stack(s), control_target);

  const Vec3 mapped =
      adjoint_rotate(measurement_stack(s).adjoint(), frame_3(xhat, t));
  c.measurement_error = (mapped - Vec3::UnitZ()).norm();
  return c;
}

}  // namespace seqmet
