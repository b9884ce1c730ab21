#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "invobs/errors.hpp"
#include "invobs/group_core.hpp"
#include "invobs/noise.hpp"
#include "invobs/rk4.hpp"

namespace invobs {

struct SimOptions {
  double dt = 0.01;
  double duration = 1.0;
  std::uint64_t seed = 0;
  std::optional<SensorNoiseSpec> noise;
  int max_halvings = 20;
  int output_stride = 1;
};

template <class S>
struct Trace {
  std::vector<double> t;
  std::vector<typename S::State> truth, estimate;
  std::vector<typename S::Error> error;
  // E(x̂, u, h(x, u)) with the clean output.
  std::vector<typename S::Output> output_error;
  long halvings = 0;
  bool truncated = false;
  std::string diagnostic;

  std::size_t size() const { return t.size(); }
};

template <class S>
using InputSignal = std::function<typename S::Input(double)>;

template <class S>
using ObserverField = std::function<typename S::State(
    const typename S::State&, const typename S::Input&, const typename S::Output&)>;

// Systems whose truth is integrated in a chart that keeps it admissible.
template <class S>
concept HasTruthChart = requires(const S& s, const typename S::State& x, const Eigen::Matrix<double, S::n, 1>& z,
                                 const typename S::Input& u) {
  { s.to_chart(x) } -> std::convertible_to<Eigen::Matrix<double, S::n, 1>>;
  { s.from_chart(z) } -> std::convertible_to<typename S::State>;
  { s.chart_dynamics(z, u) } -> std::convertible_to<Eigen::Matrix<double, S::n, 1>>;
};

template <class S>
concept HasSensorModel = requires(const S& s, const SensorNoiseSpec& spec, const NoiseDraw& d,
                                  const typename S::Input& u, const typename S::Output& y) {
  s.corrupt(spec, d, u, y);
};

// Number of steps in [0, duration], rejecting a dt that does not divide it.
long step_count(double dt, double duration);

template <SymmetricSystem S>
Trace<S> simulate_with_observer(const S& sys, const ObserverField<S>& observer,
                                const typename S::State& x0, const typename S::State& xh0,
                                const InputSignal<S>& input, const SimOptions& opt) {
  using State = typename S::State;
  using Input = typename S::Input;
  using Output = typename S::Output;
  constexpr int n = S::n;
  using Aug = Eigen::Matrix<double, 2 * n, 1>;

  const long N = step_count(opt.dt, opt.duration);
  if (opt.output_stride < 1) throw ValidationError("simulate: output_stride must be >= 1");
  if (opt.max_halvings < 0) throw ValidationError("simulate: max_halvings must be >= 0");
  require_domain(sys, x0, "simulate: initial truth");
  require_domain(sys, xh0, "simulate: initial estimate");
  if constexpr (!HasSensorModel<S>) {
    if (opt.noise) throw ValidationError("simulate: this system has no sensor noise model");
  }

  auto truth_of = [&](const Eigen::Matrix<double, n, 1>& z) -> State {
    if constexpr (HasTruthChart<S>) return sys.from_chart(z);
    else return z;
  };
  auto project = [&](const State& s) -> State {
    if constexpr (requires { sys.project(s); }) return sys.project(s);
    else return s;
  };

  Rng rng(opt.seed);
  Aug s;
  if constexpr (HasTruthChart<S>) s << sys.to_chart(x0), xh0;
  else s << x0, xh0;

  Trace<S> tr;
  auto record = [&](double t, const Aug& a) {
    const State x = truth_of(a.template head<n>());
    const State xh = a.template tail<n>();
    tr.t.push_back(t);
    tr.truth.push_back(x);
    tr.estimate.push_back(xh);
    tr.error.push_back(invariant_state_error(sys, x, xh));
    const Input u = input(t);
    tr.output_error.push_back(sys.output_error(xh, u, sys.output(x, u)));
  };
  record(0.0, s);

  for (long i = 0; i < N; ++i) {
    const double t = static_cast<double>(i) * opt.dt;
    NoiseDraw draw;
    if (opt.noise) draw = NoiseDraw::sample(rng);

    auto field = [&](double tt, const Aug& a) -> Aug {
      const Eigen::Matrix<double, n, 1> z = a.template head<n>();
      const State x = truth_of(z);
      const State xh = a.template tail<n>();
      const Input u = input(tt);
      const Output y = sys.output(x, u);
      Aug d;
      if constexpr (HasTruthChart<S>) d.template head<n>() = sys.chart_dynamics(z, u);
      else d.template head<n>() = sys.dynamics(x, u);
      if constexpr (HasSensorModel<S>) {
        if (opt.noise) {
          const auto [um, ym] = sys.corrupt(*opt.noise, draw, u, y);
          d.template tail<n>() = observer(xh, um, ym);
          return d;
        }
      }
      d.template tail<n>() = observer(xh, u, y);
      return d;
    };

    std::string why;
    std::function<std::optional<Aug>(double, const Aug&, double, int)> advance =
        [&](double t0, const Aug& a, double h, int depth) -> std::optional<Aug> {
      try {
        Aug r = rk4_step(field, t0, a, h);
        if constexpr (!HasTruthChart<S>) r.template head<n>() = project(r.template head<n>());
        r.template tail<n>() = project(r.template tail<n>());
        if (r.allFinite() && sys.in_domain(r.template tail<n>())) return r;
        why = "estimate left the admissible domain";
      } catch (const DomainError& e) {
        why = e.what();
      } catch (const NumericError& e) {
        why = e.what();
      }
      if (depth >= opt.max_halvings) return std::nullopt;
      ++tr.halvings;
      const auto mid = advance(t0, a, 0.5 * h, depth + 1);
      if (!mid) return std::nullopt;
      return advance(t0 + 0.5 * h, *mid, 0.5 * h, depth + 1);
    };

    const auto next = advance(t, s, opt.dt, 0);
    if (!next) {
      std::ostringstream os;
      os.precision(17);
      os << "step from t=" << t << " failed after " << opt.max_halvings << " halvings: " << why;
      tr.truncated = true;
      tr.diagnostic = os.str();
      break;
    }
    s = *next;
    if ((i + 1) % opt.output_stride == 0 || i + 1 == N) record(static_cast<double>(i + 1) * opt.dt, s);
  }
  return tr;
}

template <SymmetricSystem S>
Trace<S> simulate_pair(const S& sys, const GainFunction<S>& gain, const typename S::State& x0,
                       const typename S::State& xh0, const InputSignal<S>& input, const SimOptions& opt) {
  const ObserverField<S> obs = [&sys, gain](const typename S::State& xh, const typename S::Input& u,
                                            const typename S::Output& y) {
    return observer_rhs(sys, gain, xh, u, y);
  };
  return simulate_with_observer(sys, obs, x0, xh0, input, opt);
}

}  // namespace invobs
