#include <gtest/gtest.h>

#include <cmath>

#include "invobs/car.hpp"
#include "invobs/ins.hpp"
#include "invobs/reactor.hpp"
#include "invobs/rk4.hpp"
#include "invobs/simulate.hpp"
#include "invobs/vtol.hpp"

using namespace invobs;

using Scalar = Eigen::Matrix<double, 1, 1>;

TEST(Rk4, ZeroFieldAndExponential) {
  const Scalar s(2.5);
  EXPECT_EQ(rk4_step([](double, const Scalar&) { return Scalar(0.0); }, 0.0, s, 0.1)[0], 2.5);
  const double h = 0.1;
  const Scalar e = rk4_step([](double, const Scalar& x) { return x; }, 0.0, Scalar(1.0), h);
  // one step is the fourth-order Taylor polynomial, local error h^5/120 e^theta
  EXPECT_NEAR(e[0], 1 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24, 1e-15);
  const double err = std::exp(h) - e[0];
  EXPECT_GT(err, std::pow(h, 5) / 120);
  EXPECT_LT(err, std::pow(h, 5) / 120 * std::exp(h));
  Scalar y(1.0);
  for (int i = 0; i < 10; ++i) y = rk4_step([](double, const Scalar& x) { return x; }, i * 0.01, y, 0.01);
  EXPECT_NEAR(y[0], std::exp(0.1), 1e-8);
}

TEST(Rk4, FourthOrderConvergence) {
  auto endpoint = [](double dt) {
    Scalar y(1.0);
    const long n = step_count(dt, 2.0);
    for (long i = 0; i < n; ++i)
      y = rk4_step([](double t, const Scalar& s) { return Scalar(-s[0] + std::sin(t)); }, i * dt, y, dt);
    return y[0];
  };
  const double exact = 1.5 * std::exp(-2.0) + 0.5 * (std::sin(2.0) - std::cos(2.0));
  const double ratio = std::abs(endpoint(0.025) - exact) / std::abs(endpoint(0.0125) - exact);
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

TEST(Rk4, Errors) {
  EXPECT_THROW(rk4_step([](double, const Scalar& x) { return x; }, 0.0, Scalar(1.0), 0.0), ValidationError);
  EXPECT_THROW(rk4_step([](double, const Scalar& x) { return x; }, 0.0, Scalar(1.0), -0.1), ValidationError);
  try {
    rk4_step([](double, const Scalar&) { return Scalar(NAN); }, 3.0, Scalar(1.0), 0.1);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_EQ(e.time(), 3.0);
  }
}

TEST(StepCount, Divisibility) {
  EXPECT_EQ(step_count(0.001, 6.15), 6150);
  EXPECT_EQ(step_count(0.1, 12000.0), 120000);
  EXPECT_EQ(step_count(0.5, 0.0), 0);
  EXPECT_THROW(step_count(0.3, 1.0), ValidationError);
  EXPECT_THROW(step_count(0.0, 1.0), ValidationError);
  EXPECT_THROW(step_count(0.1, -1.0), ValidationError);
}

TEST(Simulate, ExactInitialEstimateStaysExact) {
  {
    const car::Car sys;
    SimOptions o;
    o.duration = 10.0;
    const car::InputProfile in;
    const auto tr = simulate_pair<car::Car>(sys, car::gain({}), {1, 2, 0.5}, {1, 2, 0.5},
                                            [in](double t) { return in(t); }, o);
    for (const auto& e : tr.error) EXPECT_LT(e.norm(), 1e-9);
  }
  {
    const ins::Environment env;
    const ins::Ins sys(env);
    const VtolTrajectorySpec spec;
    SimOptions o;
    o.dt = 1e-3;
    o.duration = spec.t3;
    const auto x0 = vtol_reference(spec, 0.0, env).state();
    const auto tr = simulate_pair<ins::Ins>(sys, constant_gain<ins::Ins>(ins::frame_gain({}, env)), x0, x0,
                                            [&](double t) { return vtol_reference(spec, t, env).input(); }, o);
    for (const auto& e : tr.error) EXPECT_LT((e - ins::make_state({}, Eigen::Vector3d::Zero())).norm(), 1e-9);
  }
  {
    const reactor::Reactor sys;
    const reactor::Reactor::Input u(2.16e12, 0.0033, 270, 0);
    const auto x0 = reactor::equilibrium(sys, u, 1.0);
    SimOptions o;
    o.dt = 0.1;
    o.duration = 1000.0;
    const auto tr = simulate_pair<reactor::Reactor>(sys, reactor::global_gain(sys, {}), x0, x0,
                                                    [u](double) { return u; }, o);
    for (const auto& e : tr.error) EXPECT_LT(e.norm(), 1e-9);
  }
}

TEST(Simulate, StrideKeepsTheFinalSample) {
  const car::Car sys;
  SimOptions o;
  o.dt = 0.01;
  o.duration = 1.05;
  o.output_stride = 10;
  const auto tr = simulate_pair<car::Car>(sys, car::gain({}), {0, 0, 0}, {1, 0, 0},
                                          [](double) { return Eigen::Vector2d(1, 0); }, o);
  ASSERT_EQ(tr.size(), 12u);
  EXPECT_NEAR(tr.t[10], 1.0, 1e-12);
  EXPECT_NEAR(tr.t.back(), 1.05, 1e-12);
}

TEST(Simulate, UnrecoverableStepTruncatesWithDiagnostic) {
  const car::Car sys;
  SimOptions o;
  o.dt = 0.01;
  o.duration = 2.0;
  o.max_halvings = 4;
  const ObserverField<car::Car> bad = [&sys](const auto& xh, const auto& u, const auto&) {
    car::Car::State d = sys.dynamics(xh, u);
    if (xh[0] > 0.5) d[0] = NAN;
    return d;
  };
  const auto tr = simulate_with_observer<car::Car>(sys, bad, {0, 0, 0}, {0, 0, 0},
                                                   [](double) { return Eigen::Vector2d(1, 0); }, o);
  EXPECT_TRUE(tr.truncated);
  EXPECT_NE(tr.diagnostic.find("halvings"), std::string::npos);
  EXPECT_GT(tr.halvings, 0);
  EXPECT_NEAR(tr.t.back(), 0.5, 0.011);
}

TEST(Simulate, HalvingRecoversFromRejectedStep) {
  // an observer that refuses only the full-size stage at one instant
  const car::Car sys;
  SimOptions o;
  o.dt = 0.1;
  o.duration = 1.0;
  int refusals = 0;
  const ObserverField<car::Car> picky = [&](const auto& xh, const auto& u, const auto&) {
    if (std::abs(xh[0] - 0.55) < 1e-9 && refusals++ == 0) throw NumericError("refused");
    return sys.dynamics(xh, u);
  };
  const auto tr = simulate_with_observer<car::Car>(sys, picky, {0, 0, 0}, {0, 0, 0},
                                                   [](double) { return Eigen::Vector2d(1, 0); }, o);
  EXPECT_FALSE(tr.truncated);
  EXPECT_EQ(tr.halvings, 1);
  EXPECT_NEAR(tr.estimate.back()[0], 1.0, 1e-12);
}

TEST(Simulate, NoiseOnSystemWithoutSensorModelRejected) {
  const car::Car sys;
  SimOptions o;
  o.noise = SensorNoiseSpec::reference_defaults();
  EXPECT_THROW(simulate_pair<car::Car>(sys, car::gain({}), {0, 0, 0}, {0, 0, 0},
                                       [](double) { return Eigen::Vector2d(1, 0); }, o),
               ValidationError);
}

TEST(Rng, PortableSequence) {
  // first output of mt19937_64 with the default seed
  Rng r(5489);
  EXPECT_EQ(r.uniform01(), static_cast<double>(14514284786278117030ull >> 11) * 0x1.0p-53);
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.normal(), b.normal());
}

TEST(Noise, CleanWhenZeroAndMoments) {
  Rng rng(9);
  const Eigen::Vector3d clean(1, 2, 3);
  EXPECT_EQ((sensor_corrupt(clean, Eigen::Vector3d::Zero(), 0.0, rng) - clean).norm(), 0.0);
  const double scale = 0.25;
  const Eigen::Vector3d bias(0.5, -0.5, 0.5);
  const long n = 100000;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero(), sq = Eigen::Vector3d::Zero();
  for (long i = 0; i < n; ++i) {
    const Eigen::Vector3d s = sensor_corrupt(clean, bias, scale, rng) - clean - bias;
    sum += s;
    sq += s.cwiseProduct(s);
  }
  const Eigen::Vector3d mean = sum / n, var = sq / n - mean.cwiseProduct(mean);
  for (int k = 0; k < 3; ++k) {
    EXPECT_LT(std::abs(mean[k]), 0.02 * scale);
    EXPECT_NEAR(var[k], scale * scale, 0.05 * scale * scale);
  }
}

TEST(Vtol, InitialConditions) {
  const ins::Environment env;
  const auto s = vtol_reference({}, 0.0, env);
  EXPECT_LT((s.q.coeffs() - Eigen::Vector4d(1, 0, 0, 0)).norm(), 1e-15);
  EXPECT_EQ(s.v.norm(), 0.0);
  EXPECT_LT((s.a + env.A_grav).norm(), 1e-12);
  EXPECT_EQ(s.P.norm() + s.dP.norm() + s.ddP.norm(), 0.0);
}

TEST(Vtol, SatisfiesNavigationDynamics) {
  const ins::Environment env;
  const ins::Ins sys(env);
  const VtolTrajectorySpec spec;
  const double h = 1e-5;
  double worst = 0.0;
  for (double t = 2 * h; t < spec.t3 + 0.5; t += 0.003) {
    const auto a = vtol_reference(spec, t - h, env), b = vtol_reference(spec, t + h, env);
    const auto m = vtol_reference(spec, t, env);
    worst = std::max(worst, ((b.state() - a.state()) / (2 * h) - sys.dynamics(m.state(), m.input())).norm());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Vtol, PeakHorizontalAcceleration) {
  const ins::Environment env;
  const VtolTrajectorySpec spec;
  double peak = 0.0;
  for (double t = 0; t <= spec.t3; t += 1e-3) peak = std::max(peak, vtol_reference(spec, t, env).ddP.head<2>().norm());
  EXPECT_NEAR(peak, 10.0, 1.5);
}

TEST(Vtol, AngleProfileAndValidation) {
  const VtolTrajectorySpec spec;
  EXPECT_THROW(vtol_angle(spec, -0.1), DomainError);
  const auto end = vtol_angle(spec, spec.t3 + 1.0);
  EXPECT_EQ(end.dth, 0.0);
  EXPECT_EQ(end.ddth, 0.0);
  EXPECT_GT(end.th, 0.0);
  VtolTrajectorySpec bad;
  bad.t2 = 1.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  // angular rate is continuous at the segment boundaries
  for (double tb : {spec.t1, spec.t2, spec.t3})
    EXPECT_NEAR(vtol_angle(spec, tb - 1e-9).dth, vtol_angle(spec, tb + 1e-9).dth, 1e-6);
}
