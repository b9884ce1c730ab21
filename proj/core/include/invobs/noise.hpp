#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace invobs {

// Portable seeded generator. std::mt19937_64 has a fully specified output
// sequence; the normal sampler is done here because the standard
// distributions are implementation-defined.
class Rng {
 public:
  static constexpr const char* kName = "mt19937_64/marsaglia-polar";

  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01();  // [0, 1), 53 random bits
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal();
  Eigen::Vector3d normal3();

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct NoiseChannel {
  Eigen::Vector3d bias = Eigen::Vector3d::Zero();
  double scale = 0.0;
};

// Bias and white-noise levels of the four inertial sensors.
struct SensorNoiseSpec {
  NoiseChannel accel;
  NoiseChannel gyro;
  NoiseChannel velocity;
  NoiseChannel magnetometer;

  static SensorNoiseSpec reference_defaults();
  static SensorNoiseSpec zero() { return {}; }
};

// One zero-order-hold sample: standard normal 3-vectors for each channel.
struct NoiseDraw {
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
  Eigen::Vector3d gyro = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d magnetometer = Eigen::Vector3d::Zero();

  static NoiseDraw sample(Rng& rng);
};

inline Eigen::Vector3d apply_channel(const Eigen::Vector3d& clean, const NoiseChannel& ch,
                                     const Eigen::Vector3d& draw) {
  return clean + ch.bias + ch.scale * draw;
}

Eigen::Vector3d sensor_corrupt(const Eigen::Vector3d& clean, const Eigen::Vector3d& bias,
                               double scale, Rng& rng);

}  // namespace invobs
