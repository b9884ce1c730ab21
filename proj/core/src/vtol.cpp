#include "invobs/vtol.hpp"

#include <cmath>
#include <numbers>

#include "invobs/errors.hpp"

namespace invobs {

using std::numbers::pi;

double VtolTrajectorySpec::c_traj() const {
  return (1.0 / (t1 * t1)) * 2.0 * pi * pi * pi / (2.0 * pi * pi + 1.0);
}

void VtolTrajectorySpec::validate() const {
  if (!(radius > 0.0)) throw ValidationError("vtol: radius must be positive");
  if (!(t1 > 0.0 && t2 >= t1 && t3 > t2)) throw ValidationError("vtol: need 0 < t1 <= t2 < t3");
  if (!(a_grav > 0.0)) throw ValidationError("vtol: a_grav must be positive");
}

namespace {

// Angle reached after a bump of duration d started at rest: theta(tau) for
// theta'' = c (1 - cos(2 pi tau / d)).
VtolAngle bump(double c, double d, double tau) {
  const double w = 2.0 * pi / d;
  VtolAngle a;
  a.dddth = c * w * std::sin(w * tau);
  a.ddth = c * (1.0 - std::cos(w * tau));
  a.dth = c * (tau - std::sin(w * tau) / w);
  a.th = c * (0.5 * tau * tau + (std::cos(w * tau) - 1.0) / (w * w));
  return a;
}

}  // namespace

VtolAngle vtol_angle(const VtolTrajectorySpec& s, double t) {
  if (!(t >= 0.0)) throw DomainError("vtol: time must be nonnegative");
  const double c = s.c_traj();
  const double d = s.t3 - s.t2;
  const VtolAngle end_up = bump(c, s.t1, s.t1);
  const double rate = end_up.dth;
  if (t <= s.t1) return bump(c, s.t1, t);
  const double th2 = end_up.th + rate * (s.t2 - s.t1);
  if (t <= s.t2) return {end_up.th + rate * (t - s.t1), rate, 0.0, 0.0};
  // deceleration mirrors the start-up bump, scaled to remove the cruise rate
  const double cd = rate / d;
  auto down = [&](double tau) {
    const VtolAngle b = bump(cd, d, tau);
    return VtolAngle{th2 + rate * tau - b.th, rate - b.dth, -b.ddth, -b.dddth};
  };
  if (t <= s.t3) return down(t - s.t2);
  const VtolAngle fin = down(d);
  return {fin.th, 0.0, 0.0, 0.0};
}

ins::Ins::Input VtolSample::input() const {
  ins::Ins::Input u;
  u << omega, a;
  return u;
}

VtolSample vtol_reference(const VtolTrajectorySpec& spec, double t, const ins::Environment& env) {
  const VtolAngle A = vtol_angle(spec, t);
  const double R = spec.radius;
  const double c = std::cos(A.th), s = std::sin(A.th);
  const Eigen::Vector3d cs(c, s, 0.0), ncs(-s, c, 0.0);

  VtolSample out;
  out.P = R * Eigen::Vector3d(s, 1.0 - c, 0.0);
  out.dP = R * A.dth * cs;
  out.ddP = R * (A.ddth * cs + A.dth * A.dth * ncs);
  out.dddP = R * ((A.dddth - A.dth * A.dth * A.dth) * cs + 3.0 * A.dth * A.ddth * ncs);

  // thrust direction k and attitude q with q^{-1} k q = A/|A|
  const Eigen::Vector3d e = env.A_grav.normalized();
  const Eigen::Vector3d sv = env.A_grav - out.ddP;
  const double ns = sv.norm();
  const Eigen::Vector3d k = sv / ns;
  const Eigen::Vector3d dk = (-out.dddP - k * k.dot(-out.dddP)) / ns;
  const double w0 = 1.0 + k.dot(e);
  if (w0 < 1e-12) throw DomainError("vtol: thrust axis opposite to gravity");
  const Eigen::Vector3d wv = e.cross(k);
  const Eigen::Vector4d w(w0, wv.x(), wv.y(), wv.z());
  const Eigen::Vector3d dwv = e.cross(dk);
  const Eigen::Vector4d dw(dk.dot(e), dwv.x(), dwv.y(), dwv.z());
  const double nw = w.norm();
  const Eigen::Vector4d qc = w / nw;
  const Eigen::Vector4d dqc = dw / nw - w * (w.dot(dw)) / (nw * nw * nw);

  out.q = Quaternion::from_coeffs(qc);
  const Quaternion dq = Quaternion::from_coeffs(dqc);
  out.v = rotate_unchecked(out.q, out.dP);
  out.a = rotate_unchecked(out.q, out.ddP - env.A_grav);
  out.omega = (2.0 * (conj(out.q) * dq)).vec();
  out.y_b = rotate_unchecked(out.q, env.B);
  return out;
}

}  // namespace invobs
