#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

#include "invobs/group_core.hpp"
#include "invobs/noise.hpp"
#include "invobs/quaternion.hpp"

// Velocity-aided attitude estimation. State (q, v) with q the body attitude
// and v the body-frame velocity; input (omega, a) from gyros and
// accelerometers; output (y_v, y_b) = (v, q^{-1} B q).
//
// Ambient state coordinates are (q0, q1, q2, q3, v1, v2, v3); the invariant
// frame has six columns, tangent to the unit sphere in the q block.
namespace invobs::ins {

struct Environment {
  Eigen::Vector3d A_grav{0.0, 0.0, 10.0};
  Eigen::Vector3d B{0.70710678118654752, 0.0, 0.70710678118654752};
  double a_grav() const { return A_grav.norm(); }
};

struct Gains {
  double M12 = 0.4, M21 = 0.4;
  double N11 = 4.0, N22 = 4.0, N33 = 2.0;
  double lambda = 4.0;
};

struct GainMatrices {
  Eigen::Matrix3d Lqv, Lqb, Lvv, Lvb;
};

// The heading row of Lqb carries lambda/2 so that the heading pole is
// -lambda((B1)^2 + (B2)^2).
GainMatrices gain_matrices(const Gains& g, const Environment& env);

struct Element {
  Quaternion q;
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
};

using Vector7d = Eigen::Matrix<double, 7, 1>;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

inline Quaternion attitude(const Vector7d& s) { return Quaternion::from_coeffs(s.head<4>()); }
Vector7d make_state(const Quaternion& q, const Eigen::Vector3d& v);

class Ins {
 public:
  static constexpr int n = 7, m = 6, p = 6, nf = 6, ni = 6;
  // |norm(q) - 1| accepted by the vector fields. Looser than the 1e-6 of
  // rotate() so that intermediate RK4 stages are admissible.
  static constexpr double kUnitTol = 1e-3;

  using State = Vector7d;
  using Input = Vector6d;   // omega, a
  using Output = Vector6d;  // y_v, y_b
  using Invariants = Vector6d;
  using Frame = Eigen::Matrix<double, 7, 6>;
  using Error = Vector7d;   // eta_q (4), eta_v (3)
  using Group = Element;

  Ins() = default;
  explicit Ins(const Environment& env) : env_(env) {}
  const Environment& env() const { return env_; }

  State dynamics(const State& s, const Input& in) const;
  Output output(const State& s, const Input&) const;

  State act_state(const Group& g, const State& s) const;
  Input act_input(const Group& g, const Input& in) const;
  Output act_output(const Group& g, const Output& y) const;
  Eigen::Matrix<double, 7, 7> differential(const Group& g) const;

  Group compose(const Group& a, const Group& b) const;
  Group inverse(const Group& g) const;
  Group identity() const { return {}; }
  double group_distance(const Group& a, const Group& b) const;

  Group moving_frame(const State& s) const;
  Frame invariant_frame(const State& s) const;
  // (q omega q^{-1}, q (a + v x omega) q^{-1})
  Invariants scalar_invariants(const State& sh, const Input& in) const;
  // (E_v, E_b) = (q̂ (v̂ - y_v) q̂^{-1}, B - q̂ y_b q̂^{-1})
  Output output_error(const State& sh, const Input&, const Output& y) const;

  // (q̂ q^{-1}, q (v̂ - v) q^{-1})
  Error state_error(const State& x, const State& xh) const;
  State project(const State& s) const;
  bool in_domain(const State& s) const;

  // Measured signals under the bias/noise model.
  std::pair<Input, Output> corrupt(const SensorNoiseSpec& spec, const NoiseDraw& d,
                                   const Input& u, const Output& y) const;

  State sample_state(Rng& rng) const;
  Input sample_input(Rng& rng) const;
  Output sample_output(Rng& rng) const;
  Group sample_group(Rng& rng) const;

 private:
  Environment env_;
};

Quaternion random_unit_quaternion(Rng& rng);

// Constant frame gain [[Lqv, Lqb], [Lvv, Lvb]] for the generic assembly.
FrameGain<Ins> frame_gain(const Gains& g, const Environment& env);

// Observer written out in quaternion form.
Ins::State observer_rhs_direct(const Ins& sys, const Gains& g, const Ins::State& sh,
                               const Ins::Input& in, const Ins::Output& y);

// Autonomous error field on (eta_q, eta_v).
Vector7d error_dynamics(const Vector7d& eta, const Gains& g, const Environment& env);

// First-order error field in (delta, delta eta_v), delta the vector part of
// eta_q near the identity.
Vector6d reduced_error_field(const Vector6d& d, const Gains& g, const Environment& env);

struct LinearizedBlocks {
  Eigen::Matrix2d longitudinal;  // (delta2, delta_v1)
  Eigen::Matrix2d lateral;       // (delta1, delta_v2)
  double vertical = 0.0;         // delta_v3
  double heading = 0.0;          // delta3
  Eigen::Vector2d heading_coupling = Eigen::Vector2d::Zero();  // on (delta1, delta2)
  Matrix6d full;                 // on (delta1, delta2, delta3, dv1, dv2, dv3)
};

LinearizedBlocks linearized_blocks(const Gains& g, const Environment& env);
// Eigenvalues of the full linearization sorted by (real, imag).
std::vector<std::complex<double>> spectrum(const Matrix6d& M);
std::vector<std::complex<double>> block_spectrum(const LinearizedBlocks& b);

double attitude_error(const Vector7d& eta);
double velocity_error(const Vector7d& eta);
// Estimate whose state error with respect to `truth` is eta.
Ins::State estimate_from_error(const Ins::State& truth, const Vector7d& eta);

}  // namespace invobs::ins
