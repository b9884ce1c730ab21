#pragma once

#include <Eigen/Dense>

#include "invobs/ins.hpp"
#include "invobs/quaternion.hpp"

// Reference manoeuvre for the inertial navigation scenario: a horizontal
// arc of a circle flown with a C^3 position profile, the thrust axis kept
// along P'' - A_grav.
namespace invobs {

struct VtolTrajectorySpec {
  double radius = 5.0;
  double t1 = 2.0, t2 = 4.15, t3 = 6.15;
  double a_grav = 10.0;

  // amplitude of the angular acceleration bump
  double c_traj() const;
  void validate() const;
};

// theta and its first three derivatives
struct VtolAngle {
  double th = 0.0, dth = 0.0, ddth = 0.0, dddth = 0.0;
};

VtolAngle vtol_angle(const VtolTrajectorySpec& spec, double t);

struct VtolSample {
  Quaternion q;
  Eigen::Vector3d v, omega, a, y_b;
  Eigen::Vector3d P, dP, ddP, dddP;

  ins::Ins::State state() const { return ins::make_state(q, v); }
  ins::Ins::Input input() const;
};

VtolSample vtol_reference(const VtolTrajectorySpec& spec, double t, const ins::Environment& env);

}  // namespace invobs
