#pragma once

#include <Eigen/Dense>

#include "invobs/group_core.hpp"
#include "invobs/noise.hpp"

// Nonholonomic car on SE(2): state (x, y, theta), input (u, v) = (speed,
// steering), output the position.
namespace invobs::car {

struct Gains {
  double a = 1.0, b = 1.0, c = 1.0;
};

struct Pose {
  double x = 0.0, y = 0.0, theta = 0.0;
};

// Wrap to (-pi, pi].
double wrap_angle(double theta);

class Car {
 public:
  static constexpr int n = 3, m = 2, p = 2, nf = 3, ni = 2;
  using State = Eigen::Vector3d;
  using Input = Eigen::Vector2d;
  using Output = Eigen::Vector2d;
  using Invariants = Eigen::Vector2d;
  using Frame = Eigen::Matrix3d;
  using Error = Eigen::Vector3d;
  using Group = Pose;

  State dynamics(const State& s, const Input& in) const;
  Output output(const State& s, const Input&) const { return s.head<2>(); }

  State act_state(const Group& g, const State& s) const;
  Input act_input(const Group&, const Input& in) const { return in; }
  Output act_output(const Group& g, const Output& y) const;
  Eigen::Matrix3d differential(const Group& g) const;

  Group compose(const Group& a, const Group& b) const;
  Group inverse(const Group& g) const;
  Group identity() const { return {}; }
  double group_distance(const Group& a, const Group& b) const;

  Group moving_frame(const State& s) const;
  Frame invariant_frame(const State& s) const;
  Invariants scalar_invariants(const State&, const Input& in) const { return in; }
  Output output_error(const State& sh, const Input&, const Output& y) const;

  // Normalized at the estimate, so that (eta_x, eta_y) equals E.
  Error state_error(const State& x, const State& xh) const;
  State project(const State& s) const;
  State state_difference(const State& a, const State& b) const;
  Error error_difference(const Error& a, const Error& b) const { return state_difference(a, b); }
  bool in_domain(const State& s) const { return s.allFinite(); }

  State sample_state(Rng& rng) const;
  Input sample_input(Rng& rng) const;
  Output sample_output(Rng& rng) const;
  Group sample_group(Rng& rng) const;
  Error sample_error(Rng& rng) const;
};

Eigen::Matrix<double, 3, 2> gain_matrix(const Gains& g, const Eigen::Vector2d& in,
                                        const Eigen::Vector2d& E);
GainFunction<Car> gain(const Gains& g);

Eigen::Vector3d error_dynamics(const Eigen::Vector3d& eta, const Eigen::Vector2d& in,
                               const Gains& g);

// Estimate whose state error with respect to `truth` is eta.
Car::State estimate_from_error(const Car::State& truth, const Eigen::Vector3d& eta);

// u(t) = u0 + u_amp sin(u_freq t), v(t) = v_amp cos(v_freq t)
struct InputProfile {
  double u0 = 1.0, u_amp = 0.5, u_freq = 0.3;
  double v_amp = 0.3, v_freq = 0.5;

  Eigen::Vector2d operator()(double t) const;
  // Closed form of the integral of |u| when u keeps its sign, else numeric.
  double abs_speed_integral(double T) const;
};

// Error norm with the heading part wrapped.
double error_norm(const Eigen::Vector3d& eta);

}  // namespace invobs::car
