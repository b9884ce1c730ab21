#include "invobs/ins.hpp"

#include <algorithm>
#include <cmath>

namespace invobs::ins {

namespace {

// q^{-1} p q and q p q^{-1} with the true inverse, so that the formulas stay
// exact group actions slightly off the unit sphere.
Eigen::Vector3d to_body(const Quaternion& q, const Eigen::Vector3d& p) {
  return (qinv(q) * Quaternion::pure(p) * q).vec();
}

Eigen::Vector3d to_earth(const Quaternion& q, const Eigen::Vector3d& p) {
  return (q * Quaternion::pure(p) * qinv(q)).vec();
}

}  // namespace

Vector7d make_state(const Quaternion& q, const Eigen::Vector3d& v) {
  Vector7d s;
  s << q.coeffs(), v;
  return s;
}

GainMatrices gain_matrices(const Gains& g, const Environment& env) {
  GainMatrices L;
  L.Lqv << 0.0, -g.M12, 0.0, g.M21, 0.0, 0.0, 0.0, 0.0, 0.0;
  L.Lqb.setZero();
  L.Lqb(2, 0) = -0.5 * g.lambda * env.B[1];
  L.Lqb(2, 1) = 0.5 * g.lambda * env.B[0];
  L.Lvv = -Eigen::Vector3d(g.N11, g.N22, g.N33).asDiagonal().toDenseMatrix();
  L.Lvb.setZero();
  return L;
}

bool Ins::in_domain(const State& s) const {
  return s.allFinite() && std::abs(s.head<4>().norm() - 1.0) < kUnitTol;
}

Ins::State Ins::dynamics(const State& s, const Input& in) const {
  require_domain(*this, s, "ins dynamics");
  const Quaternion q = attitude(s);
  const Eigen::Vector3d v = s.tail<3>(), w = in.head<3>(), a = in.tail<3>();
  const Quaternion dq = 0.5 * (q * Quaternion::pure(w));
  return make_state(dq, v.cross(w) + to_body(q, env_.A_grav) + a);
}

Ins::Output Ins::output(const State& s, const Input&) const {
  Output y;
  y << s.tail<3>(), to_body(attitude(s), env_.B);
  return y;
}

Ins::State Ins::act_state(const Group& g, const State& s) const {
  return make_state(attitude(s) * g.q, to_body(g.q, s.tail<3>()) + g.v);
}

Ins::Input Ins::act_input(const Group& g, const Input& in) const {
  const Eigen::Vector3d w = to_body(g.q, in.head<3>());
  Input r;
  r << w, to_body(g.q, in.tail<3>()) - g.v.cross(w);
  return r;
}

Ins::Output Ins::act_output(const Group& g, const Output& y) const {
  Output r;
  r << to_body(g.q, y.head<3>()) + g.v, to_body(g.q, y.tail<3>());
  return r;
}

Eigen::Matrix<double, 7, 7> Ins::differential(const Group& g) const {
  Eigen::Matrix<double, 7, 7> D = Eigen::Matrix<double, 7, 7>::Zero();
  D.topLeftCorner<4, 4>() = right_mult_matrix(g.q);
  for (int i = 0; i < 3; ++i) D.block<3, 1>(4, 4 + i) = to_body(g.q, Eigen::Vector3d::Unit(i));
  return D;
}

// act(a, act(b, x)) = act(compose(a, b), x)
Element Ins::compose(const Group& a, const Group& b) const {
  return {b.q * a.q, to_body(a.q, b.v) + a.v};
}

Element Ins::inverse(const Group& g) const { return {qinv(g.q), -to_earth(g.q, g.v)}; }

double Ins::group_distance(const Group& a, const Group& b) const {
  return rotation_angle(qinv(a.q) * b.q) + (a.v - b.v).norm();
}

Element Ins::moving_frame(const State& s) const {
  const Quaternion q = attitude(s);
  return {qinv(q), -to_earth(q, s.tail<3>())};
}

Ins::Frame Ins::invariant_frame(const State& s) const {
  const Quaternion q = attitude(s);
  Frame W = Frame::Zero();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d e = Eigen::Vector3d::Unit(i);
    W.block<4, 1>(0, i) = (Quaternion::pure(e) * q).coeffs();
    W.block<3, 1>(4, 3 + i) = to_body(q, e);
  }
  return W;
}

Ins::Invariants Ins::scalar_invariants(const State& sh, const Input& in) const {
  const Quaternion q = attitude(sh);
  const Eigen::Vector3d v = sh.tail<3>(), w = in.head<3>(), a = in.tail<3>();
  Invariants I;
  I << to_earth(q, w), to_earth(q, a + v.cross(w));
  return I;
}

Ins::Output Ins::output_error(const State& sh, const Input&, const Output& y) const {
  const Quaternion q = attitude(sh);
  Output E;
  E << to_earth(q, sh.tail<3>() - y.head<3>()), env_.B - to_earth(q, y.tail<3>());
  return E;
}

Ins::Error Ins::state_error(const State& x, const State& xh) const {
  const Quaternion q = attitude(x), qh = attitude(xh);
  return make_state(qh * qinv(q), to_earth(q, xh.tail<3>() - x.tail<3>()));
}

Ins::State Ins::project(const State& s) const {
  return make_state(normalized(attitude(s)), s.tail<3>());
}

std::pair<Ins::Input, Ins::Output> Ins::corrupt(const SensorNoiseSpec& spec, const NoiseDraw& d,
                                                const Input& u, const Output& y) const {
  Input um;
  um << apply_channel(u.head<3>(), spec.gyro, d.gyro), apply_channel(u.tail<3>(), spec.accel, d.accel);
  Output ym;
  ym << apply_channel(y.head<3>(), spec.velocity, d.velocity),
      apply_channel(y.tail<3>(), spec.magnetometer, d.magnetometer);
  return {um, ym};
}

Quaternion random_unit_quaternion(Rng& rng) {
  Eigen::Vector4d c;
  do {
    c << rng.normal(), rng.normal(), rng.normal(), rng.normal();
  } while (c.norm() < 1e-3);
  return Quaternion::from_coeffs(c.normalized());
}

Ins::State Ins::sample_state(Rng& rng) const {
  return make_state(random_unit_quaternion(rng), 5.0 * rng.normal3());
}

Ins::Input Ins::sample_input(Rng& rng) const {
  Input u;
  u << rng.normal3(), 5.0 * rng.normal3();
  return u;
}

Ins::Output Ins::sample_output(Rng& rng) const {
  Output y;
  y << 5.0 * rng.normal3(), rng.normal3();
  return y;
}

Element Ins::sample_group(Rng& rng) const { return {random_unit_quaternion(rng), 5.0 * rng.normal3()}; }

FrameGain<Ins> frame_gain(const Gains& g, const Environment& env) {
  const GainMatrices L = gain_matrices(g, env);
  FrameGain<Ins> K;
  K << L.Lqv, L.Lqb, L.Lvv, L.Lvb;
  return K;
}

Ins::State observer_rhs_direct(const Ins& sys, const Gains& g, const Ins::State& sh,
                               const Ins::Input& in, const Ins::Output& y) {
  require_domain(sys, sh, "ins observer");
  const GainMatrices L = gain_matrices(g, sys.env());
  const Quaternion q = attitude(sh);
  const Eigen::Vector3d v = sh.tail<3>(), w = in.head<3>(), a = in.tail<3>();
  const Eigen::Vector3d Ev = to_earth(q, v - y.head<3>());
  const Eigen::Vector3d Eb = sys.env().B - to_earth(q, y.tail<3>());
  const Quaternion dq = 0.5 * (q * Quaternion::pure(w)) + Quaternion::pure(L.Lqv * Ev + L.Lqb * Eb) * q;
  const Eigen::Vector3d dv = v.cross(w) + to_body(q, sys.env().A_grav) + a + to_body(q, L.Lvv * Ev + L.Lvb * Eb);
  return make_state(dq, dv);
}

Vector7d error_dynamics(const Vector7d& eta, const Gains& g, const Environment& env) {
  const Quaternion eq = attitude(eta);
  if (!(std::abs(norm(eq) - 1.0) < Ins::kUnitTol)) throw DomainError("ins error dynamics: eta_q is not unit");
  const GainMatrices L = gain_matrices(g, env);
  const Eigen::Vector3d ev = eta.tail<3>();
  const Eigen::Vector3d Ev = to_earth(eq, ev);
  const Eigen::Vector3d Eb = env.B - to_earth(eq, env.B);
  const Quaternion deq = Quaternion::pure(L.Lqv * Ev + L.Lqb * Eb) * eq;
  const Eigen::Vector3d dev = to_body(eq, env.A_grav + L.Lvv * Ev + L.Lvb * Eb) - env.A_grav;
  return make_state(deq, dev);
}

Vector6d reduced_error_field(const Vector6d& d, const Gains& g, const Environment& env) {
  const Eigen::Vector3d dq = d.head<3>();
  const double s2 = dq.squaredNorm();
  if (!(s2 < 1.0)) throw DomainError("ins reduced error field: |delta| must be below 1");
  const Vector7d eta = make_state(Quaternion(std::sqrt(1.0 - s2), dq.x(), dq.y(), dq.z()), d.tail<3>());
  const Vector7d r = error_dynamics(eta, g, env);
  Vector6d out;
  out << r.segment<3>(1), r.tail<3>();
  return out;
}

LinearizedBlocks linearized_blocks(const Gains& g, const Environment& env) {
  const double ag = env.a_grav();
  const Eigen::Vector3d& B = env.B;
  LinearizedBlocks b;
  b.longitudinal << 0.0, g.M21, -2.0 * ag, -g.N11;
  b.lateral << 0.0, -g.M12, 2.0 * ag, -g.N22;
  b.vertical = -g.N33;
  b.heading = -g.lambda * (B[0] * B[0] + B[1] * B[1]);
  b.heading_coupling << g.lambda * B[2] * B[0], g.lambda * B[2] * B[1];

  // order (delta1, delta2, delta3, dv1, dv2, dv3)
  Matrix6d F = Matrix6d::Zero();
  F(1, 3) = b.longitudinal(0, 1);
  F(3, 1) = b.longitudinal(1, 0);
  F(3, 3) = b.longitudinal(1, 1);
  F(0, 4) = b.lateral(0, 1);
  F(4, 0) = b.lateral(1, 0);
  F(4, 4) = b.lateral(1, 1);
  F(5, 5) = b.vertical;
  F(2, 0) = b.heading_coupling[0];
  F(2, 1) = b.heading_coupling[1];
  F(2, 2) = b.heading;
  b.full = F;
  return b;
}

namespace {

void sort_spectrum(std::vector<std::complex<double>>& ev) {
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
}

}  // namespace

std::vector<std::complex<double>> spectrum(const Matrix6d& M) {
  Eigen::EigenSolver<Matrix6d> es(M, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + 6);
  sort_spectrum(ev);
  return ev;
}

std::vector<std::complex<double>> block_spectrum(const LinearizedBlocks& b) {
  std::vector<std::complex<double>> ev;
  for (const Eigen::Matrix2d& M : {b.longitudinal, b.lateral}) {
    const Eigen::Vector2cd e = Eigen::EigenSolver<Eigen::Matrix2d>(M, false).eigenvalues();
    ev.push_back(e[0]);
    ev.push_back(e[1]);
  }
  ev.emplace_back(b.vertical, 0.0);
  ev.emplace_back(b.heading, 0.0);
  sort_spectrum(ev);
  return ev;
}

double attitude_error(const Vector7d& eta) { return rotation_angle(attitude(eta)); }

double velocity_error(const Vector7d& eta) { return eta.tail<3>().norm(); }

Ins::State estimate_from_error(const Ins::State& truth, const Vector7d& eta) {
  const Quaternion q = attitude(truth);
  return make_state(attitude(eta) * q, truth.tail<3>() + to_body(q, eta.tail<3>()));
}

}  // namespace invobs::ins
