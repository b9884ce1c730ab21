#include "invobs/car.hpp"

#include <cmath>
#include <numbers>

namespace invobs::car {

namespace {

Eigen::Matrix2d rot(double th) {
  const double c = std::cos(th), s = std::sin(th);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  return R;
}

}  // namespace

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

Car::State Car::dynamics(const State& s, const Input& in) const {
  return {in[0] * std::cos(s[2]), in[0] * std::sin(s[2]), in[0] * in[1]};
}

Car::State Car::act_state(const Group& g, const State& s) const {
  State r;
  r.head<2>() = rot(g.theta) * s.head<2>() + Eigen::Vector2d(g.x, g.y);
  r[2] = wrap_angle(s[2] + g.theta);
  return r;
}

Car::Output Car::act_output(const Group& g, const Output& y) const {
  return rot(g.theta) * y + Eigen::Vector2d(g.x, g.y);
}

Eigen::Matrix3d Car::differential(const Group& g) const {
  Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
  D.topLeftCorner<2, 2>() = rot(g.theta);
  return D;
}

Pose Car::compose(const Group& a, const Group& b) const {
  const Eigen::Vector2d t = rot(a.theta) * Eigen::Vector2d(b.x, b.y) + Eigen::Vector2d(a.x, a.y);
  return {t.x(), t.y(), wrap_angle(a.theta + b.theta)};
}

Pose Car::inverse(const Group& g) const {
  const Eigen::Vector2d t = -(rot(-g.theta) * Eigen::Vector2d(g.x, g.y));
  return {t.x(), t.y(), wrap_angle(-g.theta)};
}

double Car::group_distance(const Group& a, const Group& b) const {
  return std::hypot(a.x - b.x, a.y - b.y) + std::abs(wrap_angle(a.theta - b.theta));
}

Pose Car::moving_frame(const State& s) const {
  const double c = std::cos(s[2]), sn = std::sin(s[2]);
  return {-s[0] * c - s[1] * sn, s[0] * sn - s[1] * c, wrap_angle(-s[2])};
}

Car::Frame Car::invariant_frame(const State& s) const { return differential({0.0, 0.0, s[2]}); }

Car::Output Car::output_error(const State& sh, const Input&, const Output& y) const {
  return rot(-sh[2]) * (sh.head<2>() - y);
}

Car::Error Car::state_error(const State& x, const State& xh) const {
  Error e;
  e.head<2>() = rot(-xh[2]) * (xh.head<2>() - x.head<2>());
  e[2] = wrap_angle(xh[2] - x[2]);
  return e;
}

Car::State Car::project(const State& s) const { return {s[0], s[1], wrap_angle(s[2])}; }

Car::State Car::state_difference(const State& a, const State& b) const {
  return {a[0] - b[0], a[1] - b[1], wrap_angle(a[2] - b[2])};
}

Car::State Car::sample_state(Rng& rng) const {
  return {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-std::numbers::pi, std::numbers::pi)};
}

Car::Input Car::sample_input(Rng& rng) const { return {rng.uniform(-2, 2), rng.uniform(-1, 1)}; }

Car::Output Car::sample_output(Rng& rng) const { return {rng.uniform(-10, 10), rng.uniform(-10, 10)}; }

Pose Car::sample_group(Rng& rng) const {
  return {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-std::numbers::pi, std::numbers::pi)};
}

Car::Error Car::sample_error(Rng& rng) const {
  return {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-std::numbers::pi, std::numbers::pi)};
}

Eigen::Matrix<double, 3, 2> gain_matrix(const Gains& g, const Eigen::Vector2d& in,
                                        const Eigen::Vector2d& E) {
  const double u = in[0], v = in[1], au = std::abs(u);
  Eigen::Matrix<double, 3, 2> L;
  L << -au * g.a, u * g.b * E[1] - u * v,
       u * v - u * g.b * E[1], -au * g.c,
       0.0, -u * g.b;
  return L;
}

GainFunction<Car> gain(const Gains& g) {
  return [g](const Car::Invariants& I, const Car::Output& E) { return gain_matrix(g, I, E); };
}

Eigen::Vector3d error_dynamics(const Eigen::Vector3d& eta, const Eigen::Vector2d& in,
                               const Gains& g) {
  const double u = in[0], au = std::abs(u);
  return {u * (1.0 - std::cos(eta[2])) - au * g.a * eta[0],
          u * std::sin(eta[2]) - au * g.c * eta[1],
          -u * g.b * eta[1]};
}

Car::State estimate_from_error(const Car::State& truth, const Eigen::Vector3d& eta) {
  const double th = wrap_angle(truth[2] + eta[2]);
  Car::State xh;
  xh.head<2>() = truth.head<2>() + rot(th) * eta.head<2>();
  xh[2] = th;
  return xh;
}

Eigen::Vector2d InputProfile::operator()(double t) const {
  return {u0 + u_amp * std::sin(u_freq * t), v_amp * std::cos(v_freq * t)};
}

double InputProfile::abs_speed_integral(double T) const {
  if (u_freq == 0.0) return std::abs(u0) * T;
  if (std::abs(u_amp) < std::abs(u0))
    return std::abs(u0 * T + u_amp / u_freq * (1.0 - std::cos(u_freq * T)));
  const int N = 20000;
  const double h = T / N;
  double acc = 0.0;
  for (int i = 0; i < N; ++i) {
    const double t = (i + 0.5) * h;
    acc += std::abs(u0 + u_amp * std::sin(u_freq * t)) * h;
  }
  return acc;
}

double error_norm(const Eigen::Vector3d& eta) {
  return Eigen::Vector3d(eta[0], eta[1], wrap_angle(eta[2])).norm();
}

}  // namespace invobs::car
