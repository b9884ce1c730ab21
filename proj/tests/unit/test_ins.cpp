#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "invobs/ins.hpp"
#include "invobs/simulate.hpp"
#include "invobs/symmetry_checks.hpp"

using namespace invobs;
using namespace invobs::ins;
using std::numbers::pi;

namespace {

Ins::Input input(const Eigen::Vector3d& w, const Eigen::Vector3d& a) {
  Ins::Input u;
  u << w, a;
  return u;
}

Vector7d unit_error(const Quaternion& q, const Eigen::Vector3d& v) { return make_state(q, v); }

}  // namespace

TEST(InsDynamics, HoverIsStationary) {
  const Environment env;
  const Ins sys(env);
  const auto d = sys.dynamics(make_state({}, Eigen::Vector3d::Zero()), input(Eigen::Vector3d::Zero(), -env.A_grav));
  EXPECT_EQ(d.norm(), 0.0);
}

TEST(InsDynamics, CoriolisTerm) {
  const Environment env;
  const Ins sys(env);
  const auto d = sys.dynamics(make_state({}, {1, 0, 0}), input({0, 0, 1}, -env.A_grav));
  EXPECT_LT((d.tail<3>() - Eigen::Vector3d(0, -1, 0)).norm(), 1e-15);
  EXPECT_LT((d.head<4>() - Eigen::Vector4d(0, 0, 0, 0.5)).norm(), 1e-15);
}

TEST(InsDynamics, AttitudeRateTangentToSphere) {
  const Ins sys;
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto s = sys.sample_state(rng);
    EXPECT_LT(std::abs(s.head<4>().dot(sys.dynamics(s, sys.sample_input(rng)).head<4>())), 1e-14);
  }
}

TEST(InsOutput, Basics) {
  const Environment env;
  const Ins sys(env);
  const auto y = sys.output(make_state({}, {1, 2, 3}), Ins::Input::Zero());
  EXPECT_EQ((y.head<3>() - Eigen::Vector3d(1, 2, 3)).norm(), 0.0);
  EXPECT_EQ((y.tail<3>() - env.B).norm(), 0.0);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto s = sys.sample_state(rng);
    const auto yy = sys.output(s, Ins::Input::Zero());
    EXPECT_EQ(yy.head<3>(), s.tail<3>());
    EXPECT_LT(std::abs(yy.tail<3>().norm() - env.B.norm()), 1e-13);
  }
}

TEST(InsGroup, IdentityActionAndInvariance) {
  const Ins sys;
  Rng rng(3);
  const auto s = sys.sample_state(rng);
  EXPECT_EQ((sys.act_state(sys.identity(), s) - s).norm(), 0.0);
  EXPECT_LT(checks::dynamics_invariance(sys, rng, 200).max, 1e-10);
  EXPECT_LT(checks::output_equivariance(sys, rng, 200).max, 1e-10);
  EXPECT_LT(checks::output_error_invariance(sys, rng, 200).max, 1e-12);
}

TEST(InsOutputError, Basics) {
  const Ins sys;
  Rng rng(4);
  const auto s = sys.sample_state(rng);
  EXPECT_LT(sys.output_error(s, Ins::Input::Zero(), sys.output(s, Ins::Input::Zero())).norm(), 1e-15);
  Ins::Output y;
  y << 0, 0, 0, sys.env().B;
  const auto E = sys.output_error(make_state({}, {1, 0, 0}), Ins::Input::Zero(), y);
  EXPECT_LT((E.head<3>() - Eigen::Vector3d(1, 0, 0)).norm(), 1e-15);
  EXPECT_LT(E.tail<3>().norm(), 1e-15);
}

TEST(InsObserver, PreObserverAndZeroGains) {
  const Ins sys;
  Rng rng(5);
  const Gains zero{0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 100; ++i) {
    const auto s = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    EXPECT_LT((observer_rhs_direct(sys, {}, s, u, sys.output(s, u)) - sys.dynamics(s, u)).norm(), 1e-13);
    EXPECT_EQ((observer_rhs_direct(sys, zero, s, u, sys.sample_output(rng)) - sys.dynamics(s, u)).norm(), 0.0);
  }
}

// correction assembled column by column from the frame (e_i q̂, 0), (0, q̂^{-1} e_i q̂)
TEST(InsObserver, MatchesFrameAssembly) {
  const Environment env;
  const Ins sys(env);
  const GainMatrices L = gain_matrices({}, env);
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const auto s = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    const auto y = sys.sample_output(rng);
    const Quaternion q = attitude(s);
    const Eigen::Vector3d Ev = (q * Quaternion::pure(s.tail<3>() - y.head<3>()) * qinv(q)).vec();
    const Eigen::Vector3d Eb = env.B - (q * Quaternion::pure(y.tail<3>()) * qinv(q)).vec();
    const Eigen::Vector3d kq = L.Lqv * Ev + L.Lqb * Eb, kv = L.Lvv * Ev + L.Lvb * Eb;
    Vector7d corr = Vector7d::Zero();
    const Eigen::Vector3d e[3] = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
    for (int k = 0; k < 3; ++k) {
      corr.head<4>() += kq[k] * (Quaternion::pure(e[k]) * q).coeffs();
      corr.tail<3>() += kv[k] * (qinv(q) * Quaternion::pure(e[k]) * q).vec();
    }
    const Vector7d ref = sys.dynamics(s, u) + corr;
    EXPECT_LT(checks::rel(observer_rhs(sys, constant_gain<Ins>(frame_gain({}, env)), s, u, y), ref), 1e-10);
    EXPECT_LT(checks::rel(observer_rhs_direct(sys, {}, s, u, y), ref), 1e-10);
  }
}

TEST(InsErrorDynamics, BothSpinEquilibria) {
  const Environment env;
  EXPECT_LT(error_dynamics(unit_error({1, 0, 0, 0}, Eigen::Vector3d::Zero()), {}, env).norm(), 1e-15);
  EXPECT_LT(error_dynamics(unit_error({-1, 0, 0, 0}, Eigen::Vector3d::Zero()), {}, env).norm(), 1e-15);
}

TEST(InsErrorDynamics, MatchesFiniteDifferenceOfSimulatedPair) {
  const Environment env;
  const Ins sys(env);
  SimOptions o;
  o.dt = 1e-3;
  o.duration = 2.0;
  const auto x0 = make_state(axis_angle({0.3, -1, 2}, 0.4), {2, 0, -1});
  const auto xh0 = estimate_from_error(x0, unit_error(axis_angle({1, 1, 1}, 1.5), {3, -2, 1}));
  const auto tr = simulate_pair<Ins>(
      sys, constant_gain<Ins>(frame_gain({}, env)), x0, xh0,
      [](double t) { return input({0.2 * std::sin(t), 0.3, -0.1 * t}, {0.5, -0.2 * std::cos(t), -9.8}); }, o);
  ASSERT_FALSE(tr.truncated);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < tr.size(); i += 37) {
    const Vector7d fd =
        (tr.error[i - 2] - 8 * tr.error[i - 1] + 8 * tr.error[i + 1] - tr.error[i + 2]) / (12 * o.dt);
    worst = std::max(worst, (fd - error_dynamics(tr.error[i], {}, env)).norm());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(InsLinearization, PoleAnchors) {
  const Environment env;
  const auto b = linearized_blocks({}, env);
  for (const Eigen::Matrix2d& M : {b.longitudinal, b.lateral}) {
    const Eigen::Vector2cd ev = M.eigenvalues();
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(ev[k].real(), -2.0, 1e-12);
      EXPECT_NEAR(std::abs(ev[k].imag()), 2.0, 1e-12);
    }
  }
  EXPECT_NEAR(b.vertical, -2.0, 1e-15);
  // heading decay -lambda (B1^2 + B2^2) with lambda = 4, B1 = 1/sqrt 2
  EXPECT_NEAR(b.heading, -4.0 * 0.5, 1e-12);
  for (const auto& z : spectrum(b.full)) {
    EXPECT_NEAR(z.real(), -2.0, 1e-9);
    EXPECT_TRUE(std::abs(std::abs(z.imag()) - 2.0) < 1e-9 || std::abs(z.imag()) < 1e-9);
  }
}

TEST(InsLinearization, BlockGainDependence) {
  const Environment env;
  Gains g;
  g.M21 = 0.1;
  g.N11 = 1.0;
  // longitudinal characteristic polynomial s^2 + N11 s + 2 a_grav M21
  const Eigen::Vector2cd ev = linearized_blocks(g, env).longitudinal.eigenvalues();
  EXPECT_NEAR((ev[0] + ev[1]).real(), -1.0, 1e-12);
  EXPECT_NEAR((ev[0] * ev[1]).real(), 2.0 * 10.0 * 0.1, 1e-12);
  g.lambda = 1.0;
  EXPECT_NEAR(linearized_blocks(g, env).heading, -0.5, 1e-12);
}

TEST(InsLinearization, FiniteDifferenceAgreement) {
  const Environment env;
  const auto full = linearized_blocks({}, env).full;
  const auto J = fd_jacobian(
      [&](const Eigen::VectorXd& d) -> Eigen::VectorXd { return reduced_error_field(Vector6d(d), {}, env); },
      Eigen::VectorXd::Zero(6), 1e-6);
  EXPECT_LT((J - full).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(InsStateError, RoundTripAndScenarioInitialError) {
  const Ins sys;
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto x = sys.sample_state(rng), xh = sys.sample_state(rng);
    EXPECT_LT((estimate_from_error(x, sys.state_error(x, xh)) - xh).norm(), 1e-13);
  }
  const auto eta = sys.state_error(make_state({}, Eigen::Vector3d::Zero()), make_state({0.5, 0.5, -0.5, 0.5}, {10, -10, 5}));
  EXPECT_NEAR(attitude_error(eta), 2 * pi / 3, 1e-14);
  EXPECT_NEAR(velocity_error(eta), 15.0, 1e-13);
}

TEST(InsSensors, CorruptionModel) {
  const Ins sys;
  Rng rng(8);
  const auto u = sys.sample_input(rng);
  const auto y = sys.sample_output(rng);
  const NoiseDraw d = NoiseDraw::sample(rng);
  const auto [u0, y0] = sys.corrupt(SensorNoiseSpec::zero(), d, u, y);
  EXPECT_EQ((u0 - u).norm() + (y0 - y).norm(), 0.0);
  const SensorNoiseSpec p = SensorNoiseSpec::reference_defaults();
  const auto [u1, y1] = sys.corrupt(p, d, u, y);
  EXPECT_LT((u1.head<3>() - (u.head<3>() + p.gyro.bias + p.gyro.scale * d.gyro)).norm(), 1e-15);
  EXPECT_LT((y1.tail<3>() - (y.tail<3>() + p.magnetometer.bias + p.magnetometer.scale * d.magnetometer)).norm(), 1e-15);
  EXPECT_NEAR(p.gyro.bias[0], 2.0 * pi / 180.0, 1e-15);
}

TEST(InsDomain, NonUnitAttitudeRejected) {
  const Ins sys;
  EXPECT_FALSE(sys.in_domain(make_state({1.01, 0, 0, 0}, Eigen::Vector3d::Zero())));
  EXPECT_THROW(sys.dynamics(make_state({1.01, 0, 0, 0}, Eigen::Vector3d::Zero()), Ins::Input::Zero()), DomainError);
}
