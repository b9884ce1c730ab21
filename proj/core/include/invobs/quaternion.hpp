#pragma once

#include <Eigen/Dense>

namespace invobs {

// Hamilton quaternion q0 + q1 e1 + q2 e2 + q3 e3 with e1*e2 = e3 and cyclic.
// Vectors of R^3 are identified with pure quaternions.
struct Quaternion {
  double q0 = 1.0, q1 = 0.0, q2 = 0.0, q3 = 0.0;

  Quaternion() = default;
  Quaternion(double a, double b, double c, double d) : q0(a), q1(b), q2(c), q3(d) {}

  static Quaternion pure(const Eigen::Vector3d& v) { return {0.0, v.x(), v.y(), v.z()}; }
  static Quaternion from_coeffs(const Eigen::Vector4d& c) { return {c[0], c[1], c[2], c[3]}; }
  static Quaternion identity() { return {}; }

  Eigen::Vector3d vec() const { return {q1, q2, q3}; }
  Eigen::Vector4d coeffs() const { return {q0, q1, q2, q3}; }
};

Quaternion operator*(const Quaternion& p, const Quaternion& q);
Quaternion operator+(const Quaternion& p, const Quaternion& q);
Quaternion operator-(const Quaternion& p, const Quaternion& q);
Quaternion operator-(const Quaternion& q);
Quaternion operator*(double s, const Quaternion& q);

inline Quaternion qmul(const Quaternion& p, const Quaternion& q) { return p * q; }

double norm(const Quaternion& q);
Quaternion conj(const Quaternion& q);
// conj(q)/|q|^2; throws DomainError for the zero quaternion.
Quaternion qinv(const Quaternion& q);
Quaternion normalized(const Quaternion& q);

// q^{-1} * p * q for unit q (|norm - 1| < 1e-6).
Eigen::Vector3d rotate(const Quaternion& q, const Eigen::Vector3d& p);
// Same map without the unit check, using the conjugate.
Eigen::Vector3d rotate_unchecked(const Quaternion& q, const Eigen::Vector3d& p);
// Matrix of p -> q^{-1} * p * q.
Eigen::Matrix3d rotation_matrix(const Quaternion& q);

// (p*q - q*p)/2 for pure quaternions, i.e. the cross product.
Eigen::Vector3d wedge(const Eigen::Vector3d& p, const Eigen::Vector3d& q);

// Matrices of p -> p*q and p -> q*p on the coefficient 4-vector.
Eigen::Matrix4d right_mult_matrix(const Quaternion& q);
Eigen::Matrix4d left_mult_matrix(const Quaternion& q);

// (cos(angle/2), sin(angle/2) axis), axis normalized.
Quaternion axis_angle(const Eigen::Vector3d& axis, double angle);

// Unit q with rotate(q, from/|from|) = to/|to| and rotation axis along from x to.
// Antiparallel inputs have no defined axis and raise DomainError.
Quaternion between_vectors(const Eigen::Vector3d& from, const Eigen::Vector3d& to);

// Rotation angle in [0, pi]; q and -q give the same value.
double rotation_angle(const Quaternion& q);

}  // namespace invobs
