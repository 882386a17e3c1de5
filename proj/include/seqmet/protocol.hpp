#pragma once

#include "seqmet/generator.hpp"

namespace seqmet {

// orthonormal frame attached to the plant at working point x
Vec3 frame_h(double x);            // field direction (sin 2x, 0, cos 2x)
Vec3 frame_1(double x);            // normalized signal direction at t = 0
Vec3 frame_2();                    // frame_h x frame_1
Vec3 frame_3(double x, double t);  // sin(t) frame_1 + cos(t) frame_2
Vec3 frame_uprime(double x, double t);  // cos(t) frame_1 - sin(t) frame_2

struct ProtocolConfig {
  double xhat = 0;        // working point the control is matched to
  int blocks = 1;         // number of evolve-control blocks
  double t = half_pi;     // single-block evolution time
  double alpha = 0;       // probe tilt off the field direction
  double beta = half_pi;  // measurement tilt off the field direction
  State2 probe = State2(1, 0);
  Vec3 probe_bloch = Vec3::UnitZ();
  Vec3 meas_axis = Vec3::UnitX();
  Matrix2c control = Matrix2c::Identity();
};

// probe cos(alpha) frame_h + sin(alpha) frame_3, measurement axis
// cos(beta) frame_h + sin(beta) frame_3, control undoing one matched block
ProtocolConfig build_protocol(double xhat, int blocks, double t, double alpha,
                              double beta);

// working point 0, t = pi/2, probe along the field, balanced measurement:
// the configuration whose fringe slope is maximal at the working point
ProtocolConfig sweet_spot_protocol(int blocks);

// physical mount angles realizing the three stacks with standard plates
struct WaveplateSettings {
  double hwp1 = 0, qwp1 = 0;           // preparation
  double qwp2 = 0, hwp2 = 0, qwp3 = 0; // control block
  double hwp3 = 0, qwp4 = 0;           // measurement rotation
};

// reduce a mount angle to (-pi/2, pi/2]; plates are pi-periodic
double normalize_plate_angle(double a);

WaveplateSettings waveplate_settings(double xhat, double t);

Matrix2c jones_rotation(double theta);
// retarder with fast axis at theta from horizontal, retardance pi
Matrix2c jones_hwp(double theta);
// retarder with fast axis at theta, retardance pi/2, slow-axis phase +i
Matrix2c jones_qwp(double theta);
// the same quarter-wave plate mounted with fast and slow axes swapped
Matrix2c jones_qwp_crossed(double theta);

Matrix2c preparation_stack(const WaveplateSettings& s);
Matrix2c control_stack(const WaveplateSettings& s);
// maps the Bloch measurement direction frame_3(xhat, t) onto +z; the final
// plate runs crossed, plain mounting only closes the map at t = pi/2
Matrix2c measurement_stack(const WaveplateSettings& s);

struct WaveplateCheck {
  double preparation_error = 0;  // Bloch distance of the prepared probe
  double control_error = 0;      // phase-insensitive distance to the control
  double measurement_error = 0;  // Bloch distance of the mapped axis from +z
};

WaveplateCheck verify_waveplate_settings(double xhat, double t);

}  // namespace seqmet
