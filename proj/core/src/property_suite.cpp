#include "invobs/property_suite.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <thread>

#include "invobs/quaternion.hpp"
#include "invobs/rk4.hpp"
#include "invobs/scenario.hpp"
#include "invobs/simulate.hpp"
#include "invobs/vtol.hpp"

namespace invobs::experiments {

using std::numbers::pi;

// ---------------------------------------------------------------- car

namespace {

car::Car::State random_pose(Rng& rng) {
  return {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-pi, pi)};
}

Trace<car::Car> car_run(const car::Gains& g, const car::InputProfile& in, const car::Car::State& x0,
                        const car::Car::State& xh0, double T, double dt, int stride) {
  const car::Car sys;
  SimOptions o;
  o.dt = dt;
  o.duration = T;
  o.output_stride = stride;
  return simulate_pair<car::Car>(sys, car::gain(g), x0, xh0, [in](double t) { return in(t); }, o);
}

}  // namespace

CarConvergence car_convergence(const car::Gains& g, const car::InputProfile& in, long runs, double T, double dt,
                               std::uint64_t seed) {
  Rng rng(seed);
  CarConvergence out;
  out.speed_integral = in.abs_speed_integral(T);
  const int stride = static_cast<int>(step_count(dt, T));
  for (long r = 0; r < runs; ++r) {
    const car::Car::State x0 = random_pose(rng);
    const Eigen::Vector3d eta0(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-(pi - 0.1), pi - 0.1));
    const auto tr = car_run(g, in, x0, car::estimate_from_error(x0, eta0), T, dt, std::max(stride, 1));
    const double e = tr.truncated ? INFINITY : car::error_norm(tr.error.back());
    out.max_final_error = std::max(out.max_final_error, std::isfinite(e) ? e : INFINITY);
    ++out.runs;
  }
  return out;
}

double car_autonomy(const car::Gains& g, const car::InputProfile& in, double T, double dt, std::uint64_t seed) {
  Rng rng(seed);
  const car::Car sys;
  const car::Car::State xa = random_pose(rng), xb = random_pose(rng);
  const Eigen::Vector3d eta0(0.8, -0.6, 2.5);
  const auto a = car_run(g, in, xa, car::estimate_from_error(xa, eta0), T, dt, 1);
  const auto b = car_run(g, in, xb, car::estimate_from_error(xb, eta0), T, dt, 1);
  if (a.truncated || b.truncated || a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, sys.error_difference(a.error[i], b.error[i]).norm());
  return m;
}

double car_error_matches_output_error(const car::Gains& g, const car::InputProfile& in, double T, double dt,
                                      std::uint64_t seed) {
  Rng rng(seed);
  const car::Car::State x0 = random_pose(rng);
  const auto tr = car_run(g, in, x0, car::estimate_from_error(x0, {0.5, 0.9, -1.9}), T, dt, 1);
  if (tr.truncated) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) m = std::max(m, (tr.error[i].head<2>() - tr.output_error[i]).norm());
  return m;
}

double car_antipodal_residual(const car::Gains& g) {
  double m = 0.0;
  for (double u : {0.05, 0.3, 1.0, 2.0, 7.5})
    for (double v : {-1.0, 0.0, 0.4})
      m = std::max(m, car::error_dynamics({2.0 / g.a, 0.0, pi}, {u, v}, g).norm());
  return m;
}

// ---------------------------------------------------------------- reactor

namespace {

struct ReactorRunStats {
  bool truncated = false;
  double final_error = INFINITY;
  double min_conc = INFINITY;
  double max_v_increase = -INFINITY;
  double max_xi_ratio = 0.0;
  double min_xi_rate = INFINITY;
};

Trace<reactor::Reactor> reactor_run(const reactor::Reactor& sys, const ReactorCase& rc,
                                    const reactor::Reactor::State& x0, const reactor::Reactor::State& xh0,
                                    const reactor::Reactor::Input& u, double T, double dt) {
  SimOptions o;
  o.dt = dt;
  o.duration = T;
  const reactor::Gains g = rc.gains;
  const ObserverField<reactor::Reactor> obs = [&sys, g](const auto& xh, const auto& in, const auto& y) {
    return reactor::observer_rhs_global(sys, xh, in, y[0], g);
  };
  return simulate_with_observer<reactor::Reactor>(sys, obs, x0, xh0, [u](double) { return u; }, o);
}

ReactorRunStats reactor_stats(const ReactorCase& rc, const reactor::Reactor::State& x0,
                              const reactor::Reactor::State& xh0, double T, double dt) {
  const reactor::Reactor sys(rc.params);
  const auto tr = reactor_run(sys, rc, x0, xh0, rc.input, T, dt);
  ReactorRunStats s;
  s.truncated = tr.truncated;
  for (const auto& xh : tr.estimate) s.min_conc = std::min({s.min_conc, xh[0], xh[1]});
  if (tr.truncated) return s;
  s.final_error = tr.error.back().norm();
  long from = -1;
  for (long i = static_cast<long>(tr.size()) - 1; i >= 0 && std::abs(tr.error[i][1]) < 1e-6; --i) from = i;
  if (from >= 0) {
    double prev = reactor::lyapunov(tr.error[from][0], tr.error[from][2], rc.gains.beta);
    for (std::size_t i = from + 1; i < tr.size(); ++i) {
      const double V = reactor::lyapunov(tr.error[i][0], tr.error[i][2], rc.gains.beta);
      s.max_v_increase = std::max(s.max_v_increase, V - prev);
      prev = V;
    }
  }
  const double xi0 = std::abs(tr.error[0][1]);
  if (xi0 > 1e-9) {
    for (std::size_t i = 1; i < tr.size(); ++i) {
      const double xi = std::abs(tr.error[i][1]);
      s.max_xi_ratio = std::max(s.max_xi_ratio, xi / xi0);
      if (xi > 1e-13) s.min_xi_rate = std::min(s.min_xi_rate, -std::log(xi / xi0) / tr.t[i]);
    }
  }
  return s;
}

std::vector<Eigen::Vector3d> reactor_offsets(long runs, Rng& rng) {
  std::vector<Eigen::Vector3d> out;
  for (long r = 0; r < runs; ++r) {
    if (r < 8)
      out.emplace_back((r & 1) ? 2.0 : -2.0, (r & 2) ? 2.0 : -2.0, (r & 4) ? 50.0 : -50.0);
    else
      out.emplace_back(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-50, 50));
  }
  return out;
}

reactor::Reactor::State apply_offset(const reactor::Reactor::State& x0, const Eigen::Vector3d& o) {
  return {x0[0] * std::pow(10.0, o[0]), x0[1] * std::pow(10.0, o[1]), x0[2] + o[2]};
}

}  // namespace

ReactorConvergence reactor_convergence(const ReactorCase& rc, long runs, double T, double dt, std::uint64_t seed) {
  const reactor::Reactor sys(rc.params);
  const reactor::Reactor::State x0 = reactor::equilibrium(sys, rc.input, rc.x_in);
  Rng rng(seed);
  const auto offsets = reactor_offsets(runs, rng);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<ReactorRunStats> stats(offsets.size());
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < hw; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < offsets.size(); i += hw) stats[i] = reactor_stats(rc, x0, apply_offset(x0, offsets[i]), T, dt);
    }));
  }
  for (auto& j : jobs) j.get();

  ReactorConvergence out;
  for (const auto& s : stats) {
    ++out.runs;
    if (s.truncated) ++out.truncated;
    out.max_final_error = std::max(out.max_final_error, s.final_error);
    out.min_concentration = std::min(out.min_concentration, s.min_conc);
    out.max_lyapunov_increase = std::max(out.max_lyapunov_increase, s.max_v_increase);
    out.max_xi_ratio = std::max(out.max_xi_ratio, s.max_xi_ratio);
    out.min_xi_rate = std::min(out.min_xi_rate, s.min_xi_rate);
  }
  return out;
}

double reactor_unit_invariance(const ReactorCase& rc, const std::vector<double>& scales, long runs, double T,
                               double dt, std::uint64_t seed) {
  const reactor::Reactor sys(rc.params);
  const reactor::Reactor::State x0 = reactor::equilibrium(sys, rc.input, rc.x_in);
  Rng rng(seed);
  const auto offsets = reactor_offsets(runs, rng);
  double worst = 0.0;
  for (const auto& off : offsets) {
    const reactor::Reactor::State xh0 = apply_offset(x0, off);
    const auto base = reactor_run(sys, rc, x0, xh0, rc.input, T, dt);
    if (base.truncated) return INFINITY;
    for (double g : scales) {
      const reactor::Scale s{g};
      const auto scaled = reactor_run(sys, rc, sys.act_state(s, x0), sys.act_state(s, xh0), sys.act_input(s, rc.input), T, dt);
      if (scaled.truncated || scaled.size() != base.size()) return INFINITY;
      for (std::size_t i = 0; i < base.size(); ++i) {
        const reactor::Reactor::State ref = sys.act_state(s, base.estimate[i]);
        for (int k = 0; k < 3; ++k)
          worst = std::max(worst, std::abs(scaled.estimate[i][k] - ref[k]) / std::abs(ref[k]));
      }
    }
  }
  return worst;
}

TangentCheck reactor_tangent_check(const ReactorCase& rc, const Eigen::Vector3d& poles) {
  const reactor::Reactor sys(rc.params);
  const reactor::Reactor::Input u = rc.input;
  const reactor::Reactor::State xb = reactor::equilibrium(sys, u, rc.x_in);
  const double a = rc.params.ea_over_r, k = rc.params.k;
  const double c = u[0], D = u[1], Tin = u[2];
  const double Xin = xb[0], X = xb[1], T = xb[2];
  const double f = sys.rate(T), fp = f * a / (T * T);

  Eigen::Matrix3d A;
  A << 0, 0, 0, D, -D - k * f, -k * fp * X, 0, c * f, -D + c * fp * X;
  Eigen::Matrix<double, 3, 4> B;
  B << 0, 0, 0, 0, 0, Xin - X, 0, 0, f * X, Tin - T, D, 1;
  const Eigen::RowVector3d C(0, 0, 1);

  // Ackermann on the dual pair (A^T, C^T)
  const Eigen::Matrix3d At = A.transpose();
  Eigen::Matrix3d ctrb;
  ctrb.col(0) = C.transpose();
  ctrb.col(1) = At * C.transpose();
  ctrb.col(2) = At * At * C.transpose();
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d pA = (At - poles[0] * I) * (At - poles[1] * I) * (At - poles[2] * I);
  const Eigen::RowVector3d K = Eigen::RowVector3d(0, 0, 1) * ctrb.inverse() * pA;
  const Eigen::Vector3d L = -K.transpose();

  const FrameGain<reactor::Reactor> Lbar = invariantize_linear_gain(sys, xb, u, Eigen::Matrix<double, 3, 1>(L));
  const auto gain = constant_gain<reactor::Reactor>(Lbar);
  const reactor::Reactor::Output yb = sys.output(xb, u);

  const auto Jx = fd_jacobian_relative(
      [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return observer_rhs(sys, gain, reactor::Reactor::State(x), u, yb); },
      xb, 1e-6);
  const auto Ju = fd_jacobian_relative(
      [&](const Eigen::VectorXd& uu) -> Eigen::VectorXd {
        return observer_rhs(sys, gain, xb, reactor::Reactor::Input(uu), yb);
      },
      u, 1e-6);
  const auto Jy = fd_jacobian_relative(
      [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return observer_rhs(sys, gain, xb, u, reactor::Reactor::Output(y));
      },
      yb, 1e-6);

  auto gap = [](const Eigen::MatrixXd& J, const Eigen::MatrixXd& ref) {
    double m = 0.0;
    for (int i = 0; i < J.rows(); ++i)
      for (int j = 0; j < J.cols(); ++j) m = std::max(m, std::abs(J(i, j) - ref(i, j)) / std::max(1.0, std::abs(ref(i, j))));
    return m;
  };
  TangentCheck t;
  t.A = A;
  t.L_mat = Eigen::Matrix3d::Zero();
  t.L_mat.col(0) = L;
  t.gap_x = gap(Jx, A + L * C);
  t.gap_u = gap(Ju, B);  // output does not depend on the input
  t.gap_y = gap(Jy, -L);
  return t;
}

// ---------------------------------------------------------------- ins

namespace {

Trace<ins::Ins> ins_run(const ins::Gains& g, const ins::Environment& env, const ins::Ins::State& x0,
                        const ins::Ins::State& xh0, const InputSignal<ins::Ins>& input, double T, double dt,
                        std::optional<SensorNoiseSpec> noise, std::uint64_t seed) {
  const ins::Ins sys(env);
  SimOptions o;
  o.dt = dt;
  o.duration = T;
  o.noise = noise;
  o.seed = seed;
  return simulate_pair<ins::Ins>(sys, constant_gain<ins::Ins>(ins::frame_gain(g, env)), x0, xh0, input, o);
}

ins::Ins::State reference_estimate() { return ins::make_state({0.5, 0.5, -0.5, 0.5}, {10.0, -10.0, 5.0}); }

}  // namespace

double ins_autonomy(const ins::Gains& g, const ins::Environment& env, double T, double dt) {
  const ins::Ins sys(env);
  const VtolTrajectorySpec spec;
  const ins::Ins::State xa = vtol_reference(spec, 0.0, env).state();
  const ins::Ins::State xha = reference_estimate();
  const ins::Vector7d eta0 = sys.state_error(xa, xha);
  const ins::Ins::State xb = ins::make_state(axis_angle({1.0, 2.0, 3.0}, 0.7), {1.0, 2.0, -1.0});
  const ins::Ins::State xhb = ins::estimate_from_error(xb, eta0);

  const auto a = ins_run(g, env, xa, xha, [spec, env](double t) { return vtol_reference(spec, t, env).input(); }, T,
                         dt, std::nullopt, 0);
  const auto b = ins_run(
      g, env, xb, xhb,
      [](double t) {
        ins::Ins::Input u;
        u << 0.3 * std::sin(t), 0.2 * std::cos(0.7 * t), 0.1, 0.5 * std::sin(0.5 * t), -0.3, -9.5 + 0.2 * std::cos(t);
        return u;
      },
      T, dt, std::nullopt, 0);
  if (a.truncated || b.truncated || a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a.error[i] - b.error[i]).norm());
  return m;
}

InsReproduction ins_reproduction(const ins::Gains& g, const ins::Environment& env, std::uint64_t seed) {
  const VtolTrajectorySpec spec;
  const ins::Ins::State x0 = vtol_reference(spec, 0.0, env).state();
  const InputSignal<ins::Ins> input = [spec, env](double t) { return vtol_reference(spec, t, env).input(); };
  InsReproduction out;
  const double dt = 1e-3;
  const auto clean = ins_run(g, env, x0, reference_estimate(), input, spec.t3, dt, std::nullopt, seed);
  const auto noisy = ins_run(g, env, x0, reference_estimate(), input, spec.t3, dt, SensorNoiseSpec::reference_defaults(), seed);
  out.truncated = clean.truncated || noisy.truncated;
  for (std::size_t i = 0; i < clean.size(); ++i)
    if (std::abs(clean.t[i] - 6.0) < 1e-9) {
      out.att_at_6 = ins::attitude_error(clean.error[i]);
      out.vel_at_6 = ins::velocity_error(clean.error[i]);
    }
  double mx = 0.0, all = 0.0, sum = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double a = ins::attitude_error(noisy.error[i]);
    all = std::max(all, a);
    if (noisy.t[i] >= 4.0 - 1e-12) {
      mx = std::max(mx, a);
      sum += a;
      ++n;
    }
  }
  out.noisy_max_att_late = mx;
  out.noisy_mean_att_late = n ? sum / n : NAN;
  out.noisy_max_att = all;
  return out;
}

double ins_linearization_gap(const ins::Gains& g, const ins::Environment& env) {
  const Eigen::MatrixXd J = fd_jacobian(
      [&](const Eigen::VectorXd& d) -> Eigen::VectorXd { return ins::reduced_error_field(ins::Vector6d(d), g, env); },
      Eigen::VectorXd::Zero(6), 1e-6);
  return (J - ins::linearized_blocks(g, env).full).cwiseAbs().maxCoeff();
}

}  // namespace invobs::experiments

// ================================================================ suite

namespace invobs::properties {

namespace {

using experiments::ReactorCase;

PropertyResult at_most(std::string name, std::string system, long n, double value, double thr, std::string note = "") {
  return {std::move(name), std::move(system), n, value, thr, "max", value <= thr, std::move(note)};
}

PropertyResult above(std::string name, std::string system, long n, double value, double thr, std::string note = "") {
  return {std::move(name), std::move(system), n, value, thr, "min", value > thr, std::move(note)};
}

template <class S>
void add_symmetry(std::vector<PropertyResult>& out, const std::string& system, const S& sys,
                  const GainFunction<S>& gain, const SuiteOptions& opt) {
  std::uint64_t salt = 0;
  for (const auto& chk : checks::symmetry_suite(sys, gain)) {
    Rng rng(opt.seed + 7919 * (++salt));
    const auto r = chk.run(rng, opt.samples);
    out.push_back(at_most(chk.name, system, r.samples, r.max, chk.threshold));
  }
}

void group_props(std::vector<PropertyResult>& out, const SuiteOptions&) {
  const auto J = fd_jacobian(
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::Vector2d(x[0] * x[0], x[1]); },
      Eigen::Vector2d(3.0, 1.0), 1e-5);
  Eigen::Matrix2d ref;
  ref << 6, 0, 0, 1;
  out.push_back(at_most("fd_jacobian_quadratic", "group", 1, (J - ref).cwiseAbs().maxCoeff(), 1e-8));
  const auto t = experiments::reactor_tangent_check(ReactorCase{}, {-0.005, -0.01, -0.02});
  out.push_back(at_most("linear_gain_invariantization", "group", 3, t.max_gap(), 1e-6,
                        "finite-difference Jacobians vs A+LC, B+LD, -L at the reactor steady state"));
}

void quaternion_props(std::vector<PropertyResult>& out, const SuiteOptions& opt) {
  Rng rng(opt.seed + 11);
  auto rq = [&] { return Quaternion(rng.normal(), rng.normal(), rng.normal(), rng.normal()); };
  double assoc = 0, normm = 0, orth = 0, inv = 0;
  for (long i = 0; i < opt.samples; ++i) {
    const Quaternion p = rq(), q = rq(), r = rq();
    assoc = std::max(assoc, ((p * q) * r - p * (q * r)).coeffs().norm() / std::max(1.0, norm(p) * norm(q) * norm(r)));
    normm = std::max(normm, std::abs(norm(p * q) - norm(p) * norm(q)) / std::max(1.0, norm(p) * norm(q)));
    const Quaternion u = ins::random_unit_quaternion(rng);
    const Eigen::Vector3d a = rng.normal3(), b = rng.normal3();
    orth = std::max(orth, std::abs(rotate(u, a).dot(rotate(u, b)) - a.dot(b)) / std::max(1.0, a.norm() * b.norm()));
    inv = std::max(inv, (u * qinv(u) - Quaternion::identity()).coeffs().norm());
  }
  out.push_back(at_most("quaternion_associativity", "quaternion", opt.samples, assoc, 1e-13));
  out.push_back(at_most("quaternion_norm_multiplicativity", "quaternion", opt.samples, normm, 1e-13));
  out.push_back(at_most("rotation_preserves_dot_products", "quaternion", opt.samples, orth, 1e-12));
  out.push_back(at_most("quaternion_inverse", "quaternion", opt.samples, inv, 1e-14));
}

void car_props(std::vector<PropertyResult>& out, const SuiteOptions& opt) {
  const car::Car sys;
  const car::Gains g;
  add_symmetry(out, "car", sys, car::gain(g), opt);
  car::Gains run_gains = g;
  if (opt.inject_car_gain_fault) run_gains.b = -run_gains.b;
  const car::InputProfile in;
  const long runs = std::max<long>(1, std::min<long>(opt.samples / 10, 20));
  const auto conv = experiments::car_convergence(run_gains, in, runs, 40.0, 0.01, opt.seed + 3);
  char note[96];
  std::snprintf(note, sizeof note, "integral of |u| = %.2f", conv.speed_integral);
  out.push_back(at_most("car_convergence", "car", conv.runs, conv.max_final_error, 1e-3, note));
  out.push_back(at_most("car_error_autonomy", "car", 2, experiments::car_autonomy(run_gains, in, 20.0, 0.01, opt.seed + 5), 1e-6));
  out.push_back(at_most("car_eta_equals_output_error", "car", 1,
                        experiments::car_error_matches_output_error(g, in, 20.0, 0.01, opt.seed + 9), 1e-10));
  out.push_back(at_most("car_antipodal_equilibrium", "car", 15, experiments::car_antipodal_residual(g), 1e-12));
}

void reactor_props(std::vector<PropertyResult>& out, const SuiteOptions& opt) {
  const ReactorCase rc;
  const reactor::Reactor sys(rc.params);
  add_symmetry(out, "reactor", sys, reactor::global_gain(sys, rc.gains), opt);

  Rng rng(opt.seed + 17);
  double rt = 0.0, forms = 0.0;
  for (long i = 0; i < opt.samples; ++i) {
    const auto x = sys.sample_state(rng);
    rt = std::max(rt, checks::rel(sys.from_chart(sys.to_chart(x)), x));
    const auto u = sys.sample_input(rng);
    const auto y = sys.sample_output(rng);
    forms = std::max(forms, checks::rel(observer_rhs(sys, reactor::global_gain(sys, rc.gains), x, u, y),
                                        reactor::observer_rhs_global(sys, x, u, y[0], rc.gains)));
  }
  out.push_back(at_most("reactor_chart_round_trip", "reactor", opt.samples, rt, 1e-12));
  out.push_back(at_most("reactor_observer_forms_agree", "reactor", opt.samples, forms, 1e-10));

  const long runs = std::max<long>(8, std::min<long>(opt.samples / 20, 16));
  const auto conv = experiments::reactor_convergence(rc, runs, 12000.0, 0.1, opt.seed + 19);
  out.push_back(above("reactor_positivity", "reactor", conv.runs, conv.min_concentration, 0.0, "min of X̂, X̂_in"));
  out.push_back(at_most("reactor_convergence", "reactor", conv.runs, conv.max_final_error, 1e-3));
  out.push_back(at_most("reactor_lyapunov_decrease", "reactor", conv.runs, conv.max_lyapunov_increase, 1e-12,
                        "max step increase of V once |xi~| < 1e-6"));
  out.push_back(above("reactor_xi_contraction_rate", "reactor", conv.runs, conv.min_xi_rate, 0.0,
                      "min over t of -log(|xi~(t)|/|xi~(0)|)/t"));
  out.push_back(at_most("reactor_unit_invariance", "reactor", 2,
                        experiments::reactor_unit_invariance(rc, {1e-3, 1e3}, 1, 2000.0, 0.1, opt.seed + 23), 1e-9));
}

void ins_props(std::vector<PropertyResult>& out, const SuiteOptions& opt) {
  const ins::Environment env;
  const ins::Ins sys(env);
  const ins::Gains g;
  add_symmetry(out, "ins", sys, constant_gain<ins::Ins>(ins::frame_gain(g, env)), opt);

  Rng rng(opt.seed + 29);
  double forms = 0.0, tangent = 0.0;
  for (long i = 0; i < opt.samples; ++i) {
    const auto x = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    const auto y = sys.sample_output(rng);
    forms = std::max(forms, checks::rel(observer_rhs(sys, constant_gain<ins::Ins>(ins::frame_gain(g, env)), x, u, y),
                                        ins::observer_rhs_direct(sys, g, x, u, y)));
    const auto d = ins::observer_rhs_direct(sys, g, x, u, y);
    tangent = std::max(tangent, std::abs(x.head<4>().dot(d.head<4>())) / std::max(1.0, d.head<4>().norm()));
  }
  out.push_back(at_most("ins_observer_forms_agree", "ins", opt.samples, forms, 1e-10));
  out.push_back(at_most("ins_attitude_rate_tangent", "ins", opt.samples, tangent, 1e-14));

  out.push_back(at_most("ins_linearization", "ins", 36, experiments::ins_linearization_gap(g, env), 1e-6));
  const auto blocks = ins::linearized_blocks(g, env);
  const auto full = ins::spectrum(blocks.full), parts = ins::block_spectrum(blocks);
  // greedy matching, since sorting ties in the real part are decided by rounding
  double sgap = 0.0, maxre = -INFINITY;
  std::vector<bool> used(parts.size(), false);
  for (const auto& z : full) {
    std::size_t best = 0;
    double d = INFINITY;
    for (std::size_t j = 0; j < parts.size(); ++j)
      if (!used[j] && std::abs(z - parts[j]) < d) {
        d = std::abs(z - parts[j]);
        best = j;
      }
    used[best] = true;
    sgap = std::max(sgap, d);
    maxre = std::max(maxre, z.real());
  }
  out.push_back(at_most("ins_block_spectrum_union", "ins", 6, sgap, 1e-9));
  out.push_back(at_most("ins_hurwitz_margin", "ins", 6, std::abs(maxre + 2.0), 1e-9, "max real part is -2"));
  out.push_back(at_most("ins_error_autonomy", "ins", 2, experiments::ins_autonomy(g, env, 10.0, 1e-3), 1e-6));

  // renormalized RK4 on q' = q omega / 2
  const long steps = 1000000;
  Quaternion q = Quaternion::identity();
  const Eigen::Vector3d w(0.7, -1.1, 0.4);
  double drift = 0.0;
  for (long i = 0; i < steps; ++i) {
    const Eigen::Vector4d c = rk4_step(
        [&](double, const Eigen::Vector4d& s) -> Eigen::Vector4d {
          return (0.5 * (Quaternion::from_coeffs(s) * Quaternion::pure(w))).coeffs();
        },
        0.0, q.coeffs(), 1e-3);
    q = normalized(Quaternion::from_coeffs(c));
    drift = std::max(drift, std::abs(norm(q) - 1.0));
  }
  out.push_back(at_most("ins_norm_preservation", "ins", steps, drift, 1e-9));
}

void sim_props(std::vector<PropertyResult>& out, const SuiteOptions& opt) {
  // RK4 order on y' = -y + sin t
  auto endpoint = [](double dt) {
    Eigen::Matrix<double, 1, 1> y(1.0);
    const long n = step_count(dt, 2.0);
    for (long i = 0; i < n; ++i)
      y = rk4_step([](double t, const Eigen::Matrix<double, 1, 1>& s) -> Eigen::Matrix<double, 1, 1> {
        return Eigen::Matrix<double, 1, 1>(-s[0] + std::sin(t));
      }, i * dt, y, dt);
    return y[0];
  };
  const double exact = 1.5 * std::exp(-2.0) + 0.5 * (std::sin(2.0) - std::cos(2.0));
  const double order = std::log2(std::abs(endpoint(0.025) - exact) / std::abs(endpoint(0.0125) - exact));
  out.push_back(at_most("rk4_fourth_order", "sim", 2, std::abs(order - 4.0), 0.25, "observed order from dt = 0.025, 0.0125"));

  const VtolTrajectorySpec spec;
  const ins::Environment env;
  const ins::Ins sys(env);
  double res = 0.0, acc = 0.0;
  for (double t = 0.0005; t < spec.t3 + 0.3; t += 0.005) {
    const double h = 1e-5;
    const auto a = vtol_reference(spec, t - h, env), b = vtol_reference(spec, t + h, env), r = vtol_reference(spec, t, env);
    res = std::max(res, ((b.state() - a.state()) / (2 * h) - sys.dynamics(r.state(), r.input())).norm());
    acc = std::max(acc, r.ddP.head<2>().norm());
  }
  out.push_back(at_most("vtol_satisfies_dynamics", "sim", 1, res, 1e-6));
  out.push_back(at_most("vtol_max_horizontal_accel", "sim", 1, std::abs(acc - 10.0) / 10.0, 0.15, "relative to 10 m/s^2"));

  // jerk continuity: no spike at segment boundaries beyond 3x the interior maximum
  double interior = 0.0, boundary = 0.0;
  const double h = 1e-4;
  for (double t = 2 * h; t < spec.t3 + 0.5; t += 1e-3) {
    const double j = ((vtol_reference(spec, t + h, env).ddP - vtol_reference(spec, t - h, env).ddP) / (2 * h)).norm();
    const bool near = std::abs(t - spec.t1) < 0.01 || std::abs(t - spec.t2) < 0.01 || std::abs(t - spec.t3) < 0.01;
    (near ? boundary : interior) = std::max(near ? boundary : interior, j);
  }
  out.push_back(at_most("vtol_jerk_continuity", "sim", 1, boundary / interior, 3.0, "boundary over interior max jerk"));

  Rng rng(opt.seed + 31);
  const long n = 100000;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero(), sq = Eigen::Vector3d::Zero();
  const Eigen::Vector3d bias(0.5, -0.5, 0.5), clean(1.0, 2.0, 3.0);
  for (long i = 0; i < n; ++i) {
    const Eigen::Vector3d s = sensor_corrupt(clean, bias, 0.25, rng) - clean - bias;
    mean += s;
    sq += s.cwiseProduct(s);
  }
  mean /= n;
  const Eigen::Vector3d var = sq / n - mean.cwiseProduct(mean);
  out.push_back(at_most("noise_mean", "sim", n, mean.cwiseAbs().maxCoeff() / 0.25, 0.02));
  out.push_back(at_most("noise_variance", "sim", n, (var / 0.0625 - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff(), 0.05));

  auto cfg = scenario::preset("car-default");
  cfg.duration = 5.0;
  cfg.seed = opt.seed;
  const bool same = scenario::run_scenario(cfg).csv == scenario::run_scenario(cfg).csv;
  out.push_back(at_most("trace_determinism", "sim", 2, same ? 0.0 : 1.0, 0.0, "byte comparison of two runs"));
}

}  // namespace

std::vector<PropertyResult> run_suite(const std::string& system, const SuiteOptions& opt) {
  if (opt.samples < 1) throw ValidationError("verify: samples must be >= 1");
  std::vector<PropertyResult> out;
  const bool all = system == "all";
  bool any = false;
  auto want = [&](const char* s) {
    const bool w = all || system == s;
    any = any || w;
    return w;
  };
  if (want("group")) group_props(out, opt);
  if (want("quaternion")) quaternion_props(out, opt);
  if (want("car")) car_props(out, opt);
  if (want("reactor")) reactor_props(out, opt);
  if (want("ins")) ins_props(out, opt);
  if (want("sim")) sim_props(out, opt);
  if (!any) throw ValidationError("verify: unknown suite '" + system + "'");
  return out;
}

bool all_pass(const std::vector<PropertyResult>& r) {
  return std::all_of(r.begin(), r.end(), [](const PropertyResult& p) { return p.pass; });
}

std::string report_json(const std::vector<PropertyResult>& r, const SuiteOptions& opt) {
  nlohmann::json j;
  j["samples"] = opt.samples;
  j["seed"] = opt.seed;
  j["fault_injection"] = opt.inject_car_gain_fault;
  j["passed"] = all_pass(r);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : r) {
    nlohmann::json e{{"name", p.name}, {"system", p.system}, {"samples", p.samples}, {"threshold", p.threshold},
                     {"kind", p.kind}, {"pass", p.pass}};
    e["value"] = std::isfinite(p.value) ? nlohmann::json(p.value) : nlohmann::json(nullptr);
    if (!p.note.empty()) e["note"] = p.note;
    arr.push_back(e);
  }
  j["properties"] = arr;
  return j.dump(2);
}

std::string report_text(const std::vector<PropertyResult>& r) {
  std::string s;
  char line[256];
  for (const auto& p : r) {
    std::snprintf(line, sizeof line, "%-4s %-10s %-34s n=%-8ld %s %.3e %s %.1e\n", p.pass ? "PASS" : "FAIL",
                  p.system.c_str(), p.name.c_str(), p.samples, p.kind == "max" ? "max" : "min", p.value,
                  p.kind == "max" ? "<=" : ">", p.threshold);
    s += line;
  }
  std::snprintf(line, sizeof line, "%zu properties, %ld failed\n", r.size(),
                static_cast<long>(std::count_if(r.begin(), r.end(), [](const PropertyResult& p) { return !p.pass; })));
  s += line;
  return s;
}

}  // namespace invobs::properties
