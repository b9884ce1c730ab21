#include "invobs/noise.hpp"

#include <cmath>
#include <numbers>

namespace invobs {

double Rng::uniform01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

Eigen::Vector3d Rng::normal3() {
  const double a = normal();
  const double b = normal();
  const double c = normal();
  return {a, b, c};
}

SensorNoiseSpec SensorNoiseSpec::reference_defaults() {
  const Eigen::Vector3d pattern(1.0, -1.0, 1.0);
  SensorNoiseSpec s;
  s.accel = {0.5 * pattern, 1.0};
  s.gyro = {(4.0 * std::numbers::pi / 360.0) * pattern, 0.25};
  s.velocity = {0.5 * pattern, 1.0};
  s.magnetometer = {0.05 * pattern, 0.1};
  return s;
}

NoiseDraw NoiseDraw::sample(Rng& rng) {
  NoiseDraw d;
  d.gyro = rng.normal3();
  d.accel = rng.normal3();
  d.velocity = rng.normal3();
  d.magnetometer = rng.normal3();
  return d;
}

Eigen::Vector3d sensor_corrupt(const Eigen::Vector3d& clean, const Eigen::Vector3d& bias,
                               double scale, Rng& rng) {
  return clean + bias + scale * rng.normal3();
}

}  // namespace invobs
