#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "invobs/car.hpp"
#include "invobs/simulate.hpp"
#include "invobs/symmetry_checks.hpp"

using namespace invobs;
using namespace invobs::car;
using std::numbers::pi;

TEST(CarDynamics, Examples) {
  const Car sys;
  EXPECT_LT((sys.dynamics({0, 0, 0}, {1, 0}) - Car::State(1, 0, 0)).norm(), 1e-15);
  EXPECT_LT((sys.dynamics({0, 0, pi / 2}, {2, 0.5}) - Car::State(0, 2, 1)).norm(), 1e-15);
  EXPECT_EQ(sys.dynamics({3, 4, 1}, {0, 0.7}).norm(), 0.0);
}

TEST(CarMovingFrame, Examples) {
  const Car sys;
  const Pose a = sys.moving_frame({0, 0, 0});
  EXPECT_EQ(std::abs(a.x) + std::abs(a.y) + std::abs(a.theta), 0.0);
  const Pose b = sys.moving_frame({1, 2, pi / 2});
  EXPECT_NEAR(b.x, -2, 1e-15);
  EXPECT_NEAR(b.y, 1, 1e-15);
  EXPECT_NEAR(b.theta, -pi / 2, 1e-15);
  Rng rng(1);
  EXPECT_LT(checks::moving_frame(sys, rng, 100).max, 1e-12);
}

TEST(CarOutputError, Examples) {
  const Car sys;
  EXPECT_EQ(sys.output_error({1, 2, 0.4}, {1, 0}, {1, 2}).norm(), 0.0);
  // theta_hat = pi/2, position offset (1, 0)
  const auto E = sys.output_error({1, 0, pi / 2}, {1, 0}, {0, 0});
  EXPECT_LT((E - Eigen::Vector2d(0, -1)).norm(), 1e-15);
  Rng rng(2);
  EXPECT_LT(checks::output_error_invariance(sys, rng, 100).max, 1e-12);
}

TEST(CarFrame, Examples) {
  const Car sys;
  EXPECT_EQ((sys.invariant_frame({5, 5, 0}) - Eigen::Matrix3d::Identity()).norm(), 0.0);
  Eigen::Matrix3d ref;
  ref << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LT((sys.invariant_frame({0, 0, pi / 2}) - ref).norm(), 1e-15);
  Rng rng(3);
  EXPECT_LT(checks::frame_invariance(sys, rng, 100).max, 1e-12);
}

TEST(CarGain, Examples) {
  const Gains g{1, 1, 1};
  EXPECT_EQ(gain_matrix(g, {0, 0.3}, {0.2, 0.1}).norm(), 0.0);
  Eigen::Matrix<double, 3, 2> ref;
  ref << -1, 0, 0, -1, 0, -1;
  EXPECT_EQ((gain_matrix(g, {1, 0}, {0.5, 0}) - ref).norm(), 0.0);
  // u -> -u flips the b and v terms, not the |u| terms
  const Eigen::Vector2d E(0.2, 0.3);
  const auto p = gain_matrix({1, 2, 3}, {1, 0.4}, E), m = gain_matrix({1, 2, 3}, {-1, 0.4}, E);
  EXPECT_DOUBLE_EQ(m(0, 0), p(0, 0));
  EXPECT_DOUBLE_EQ(m(1, 1), p(1, 1));
  EXPECT_DOUBLE_EQ(m(0, 1), -p(0, 1));
  EXPECT_DOUBLE_EQ(m(1, 0), -p(1, 0));
  EXPECT_DOUBLE_EQ(m(2, 1), -p(2, 1));
}

TEST(CarErrorDynamics, Equilibria) {
  const Gains g{1.5, 1, 1};
  EXPECT_EQ(error_dynamics(Eigen::Vector3d::Zero(), {1, 0.2}, g).norm(), 0.0);
  for (double u : {0.1, 1.0, 3.0}) EXPECT_LT(error_dynamics({2 / g.a, 0, pi}, {u, 0.5}, g).norm(), 1e-12);
}

TEST(CarErrorDynamics, MatchesFiniteDifferenceOfSimulatedPair) {
  const Car sys;
  const Gains g{1, 1, 1};
  const InputProfile in;
  SimOptions o;
  o.dt = 1e-3;
  o.duration = 3.0;
  const Car::State x0(1, -2, 0.3);
  const auto tr = simulate_pair<Car>(sys, gain(g), x0, estimate_from_error(x0, {0.7, -0.4, 1.2}),
                                     [in](double t) { return in(t); }, o);
  ASSERT_FALSE(tr.truncated);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < tr.size(); i += 97) {
    const Eigen::Vector3d fd = sys.error_difference(tr.error[i + 1], tr.error[i - 1]) / (2 * o.dt);
    worst = std::max(worst, (fd - error_dynamics(tr.error[i], in(tr.t[i]), g)).norm());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(CarStateError, EstimateFromErrorRoundTrip) {
  const Car sys;
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto x = sys.sample_state(rng);
    const auto eta = sys.sample_error(rng);
    EXPECT_LT(sys.error_difference(sys.state_error(x, estimate_from_error(x, eta)), eta).norm(), 1e-12);
  }
}

TEST(CarStateError, FirstTwoCoordinatesAreTheOutputError) {
  const Car sys;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto x = sys.sample_state(rng), xh = sys.sample_state(rng);
    EXPECT_LT((sys.state_error(x, xh).head<2>() - sys.output_error(xh, {1, 0}, x.head<2>())).norm(), 1e-12);
  }
}

TEST(InputProfile, SpeedIntegralClosedForm) {
  const InputProfile p;
  const double T = 40.0;
  double acc = 0.0;
  const int N = 400000;
  for (int i = 0; i < N; ++i) acc += std::abs(p((i + 0.5) * T / N)[0]) * T / N;
  EXPECT_NEAR(p.abs_speed_integral(T), acc, 1e-6);
  EXPECT_GE(p.abs_speed_integral(T), 40.0);
}

TEST(WrapAngle, Range) {
  EXPECT_DOUBLE_EQ(wrap_angle(pi), pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-pi), pi);
  EXPECT_NEAR(wrap_angle(3 * pi / 2), -pi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(7.0), 7.0 - 2 * pi, 1e-15);
}
