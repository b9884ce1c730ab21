#include "invobs/quaternion.hpp"

#include <cmath>

#include "invobs/errors.hpp"

namespace invobs {

Quaternion operator*(const Quaternion& p, const Quaternion& q) {
  return {p.q0 * q.q0 - p.q1 * q.q1 - p.q2 * q.q2 - p.q3 * q.q3,
          p.q0 * q.q1 + p.q1 * q.q0 + p.q2 * q.q3 - p.q3 * q.q2,
          p.q0 * q.q2 - p.q1 * q.q3 + p.q2 * q.q0 + p.q3 * q.q1,
          p.q0 * q.q3 + p.q1 * q.q2 - p.q2 * q.q1 + p.q3 * q.q0};
}

Quaternion operator+(const Quaternion& p, const Quaternion& q) {
  return {p.q0 + q.q0, p.q1 + q.q1, p.q2 + q.q2, p.q3 + q.q3};
}

Quaternion operator-(const Quaternion& p, const Quaternion& q) {
  return {p.q0 - q.q0, p.q1 - q.q1, p.q2 - q.q2, p.q3 - q.q3};
}

Quaternion operator-(const Quaternion& q) { return {-q.q0, -q.q1, -q.q2, -q.q3}; }

Quaternion operator*(double s, const Quaternion& q) {
  return {s * q.q0, s * q.q1, s * q.q2, s * q.q3};
}

double norm(const Quaternion& q) { return q.coeffs().norm(); }

Quaternion conj(const Quaternion& q) { return {q.q0, -q.q1, -q.q2, -q.q3}; }

Quaternion qinv(const Quaternion& q) {
  const double n2 = q.coeffs().squaredNorm();
  if (!(n2 > 0.0)) throw DomainError("qinv: zero quaternion has no inverse");
  return (1.0 / n2) * conj(q);
}

Quaternion normalized(const Quaternion& q) {
  const double n = norm(q);
  if (!(n > 0.0)) throw DomainError("normalized: zero quaternion");
  return (1.0 / n) * q;
}

Eigen::Vector3d rotate_unchecked(const Quaternion& q, const Eigen::Vector3d& p) {
  return (conj(q) * Quaternion::pure(p) * q).vec();
}

Eigen::Vector3d rotate(const Quaternion& q, const Eigen::Vector3d& p) {
  if (!(std::abs(norm(q) - 1.0) < 1e-6)) throw DomainError("rotate: quaternion is not unit");
  return rotate_unchecked(q, p);
}

Eigen::Matrix3d rotation_matrix(const Quaternion& q) {
  Eigen::Matrix3d R;
  for (int i = 0; i < 3; ++i) R.col(i) = rotate_unchecked(q, Eigen::Vector3d::Unit(i));
  return R;
}

Eigen::Vector3d wedge(const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
  const Quaternion P = Quaternion::pure(p), Q = Quaternion::pure(q);
  return (0.5 * (P * Q - Q * P)).vec();
}

Eigen::Matrix4d right_mult_matrix(const Quaternion& q) {
  Eigen::Matrix4d M;
  for (int i = 0; i < 4; ++i)
    M.col(i) = (Quaternion::from_coeffs(Eigen::Vector4d::Unit(i)) * q).coeffs();
  return M;
}

Eigen::Matrix4d left_mult_matrix(const Quaternion& q) {
  Eigen::Matrix4d M;
  for (int i = 0; i < 4; ++i)
    M.col(i) = (q * Quaternion::from_coeffs(Eigen::Vector4d::Unit(i))).coeffs();
  return M;
}

Quaternion axis_angle(const Eigen::Vector3d& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw DomainError("axis_angle: zero axis");
  const Eigen::Vector3d a = axis / n * std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), a.x(), a.y(), a.z()};
}

Quaternion between_vectors(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const double nf = from.norm(), nt = to.norm();
  if (!(nf > 0.0) || !(nt > 0.0)) throw DomainError("between_vectors: zero vector");
  const Eigen::Vector3d f = from / nf, t = to / nt;
  const double d = f.dot(t);
  if (1.0 + d < 1e-12) throw DomainError("between_vectors: antiparallel vectors, axis undefined");
  const Eigen::Vector3d w = t.cross(f);
  return normalized({1.0 + d, w.x(), w.y(), w.z()});
}

double rotation_angle(const Quaternion& q) {
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.q0));
}

}  // namespace invobs
