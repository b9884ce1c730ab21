#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "invobs/group_core.hpp"
#include "invobs/noise.hpp"

// Randomized checks of the symmetry identities of a system. Each returns the
// largest residual over `samples` draws; residuals of vector quantities are
// relative to max(1, |reference|).
namespace invobs::checks {

struct Residual {
  double max = 0.0;
  long samples = 0;
  void add(double r) {
    max = std::max(max, std::isfinite(r) ? r : INFINITY);
    ++samples;
  }
};

template <class A, class B>
double rel(const A& a, const B& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

template <SymmetricSystem S>
double state_gap(const S& sys, const typename S::State& a, const typename S::State& b) {
  return state_difference(sys, a, b).norm() / std::max(1.0, b.norm());
}

template <SymmetricSystem S>
Residual group_axioms(const S& sys, Rng& rng, long samples) {
  Residual r;
  const auto e = sys.identity();
  for (long i = 0; i < samples; ++i) {
    const auto a = sys.sample_group(rng), b = sys.sample_group(rng), c = sys.sample_group(rng);
    const auto x = sys.sample_state(rng);
    double m = 0.0;
    m = std::max(m, sys.group_distance(sys.compose(a, e), a));
    m = std::max(m, sys.group_distance(sys.compose(e, a), a));
    m = std::max(m, sys.group_distance(sys.compose(sys.inverse(a), a), e));
    m = std::max(m, sys.group_distance(sys.compose(a, sys.inverse(a)), e));
    m = std::max(m, sys.group_distance(sys.compose(sys.compose(a, b), c), sys.compose(a, sys.compose(b, c))));
    m = std::max(m, state_gap(sys, sys.act_state(e, x), x));
    m = std::max(m, state_gap(sys, sys.act_state(b, sys.act_state(a, x)), sys.act_state(sys.compose(b, a), x)));
    r.add(m);
  }
  return r;
}

// gamma(phi_g(x)) g = gamma(x), and gamma(x) maps x onto the cross-section.
template <SymmetricSystem S>
Residual moving_frame(const S& sys, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto g = sys.sample_group(rng);
    const auto x = sys.sample_state(rng);
    const auto gx = sys.moving_frame(x);
    double m = sys.group_distance(sys.compose(sys.moving_frame(sys.act_state(g, x)), g), gx);
    m = std::max(m, sys.group_distance(sys.moving_frame(sys.act_state(gx, x)), sys.identity()));
    r.add(m);
  }
  return r;
}

template <SymmetricSystem S>
Residual dynamics_invariance(const S& sys, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto g = sys.sample_group(rng);
    const auto x = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    const typename S::State lhs = sys.dynamics(sys.act_state(g, x), sys.act_input(g, u));
    const typename S::State rhs = sys.differential(g) * sys.dynamics(x, u);
    r.add(rel(lhs, rhs));
  }
  return r;
}

template <SymmetricSystem S>
Residual output_equivariance(const S& sys, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto g = sys.sample_group(rng);
    const auto x = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    r.add(rel(sys.output(sys.act_state(g, x), sys.act_input(g, u)), sys.act_output(g, sys.output(x, u))));
  }
  return r;
}

// E(x̂, u, h(x̂, u)) = 0
template <SymmetricSystem S>
Residual output_error_zero(const S& sys, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto x = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    r.add(sys.output_error(x, u, sys.output(x, u)).norm());
  }
  return r;
}

template <SymmetricSystem S>
Residual output_error_invariance(const S& sys, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto g = sys.sample_group(rng);
    const auto x = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    const auto y = sys.sample_output(rng);
    r.add(rel(sys.output_error(sys.act_state(g, x), sys.act_input(g, u), sys.act_output(g, y)),
              sys.output_error(x, u, y)));
  }
  return r;
}

template <SymmetricSystem S>
Residual scalar_invariants(const S& sys, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto g = sys.sample_group(rng);
    const auto x = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    r.add(rel(sys.scalar_invariants(sys.act_state(g, x), sys.act_input(g, u)), sys.scalar_invariants(x, u)));
  }
  return r;
}

// D phi_g w_i(x) = w_i(phi_g(x))
template <SymmetricSystem S>
Residual frame_invariance(const S& sys, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto g = sys.sample_group(rng);
    const auto x = sys.sample_state(rng);
    const Eigen::MatrixXd lhs = sys.differential(g) * sys.invariant_frame(x);
    const Eigen::MatrixXd rhs = sys.invariant_frame(sys.act_state(g, x));
    r.add((lhs - rhs).norm() / std::max(1.0, rhs.norm()));
  }
  return r;
}

// Largest condition number of W(x) over the samples.
template <SymmetricSystem S>
Residual frame_conditioning(const S& sys, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) r.add(condition_number(sys.invariant_frame(sys.sample_state(rng))));
  return r;
}

template <SymmetricSystem S>
Residual observer_invariance(const S& sys, const GainFunction<S>& gain, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto g = sys.sample_group(rng);
    const auto x = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    const auto y = sys.sample_output(rng);
    const typename S::State lhs =
        observer_rhs(sys, gain, sys.act_state(g, x), sys.act_input(g, u), sys.act_output(g, y));
    const typename S::State rhs = sys.differential(g) * observer_rhs(sys, gain, x, u, y);
    r.add(rel(lhs, rhs));
  }
  return r;
}

// F(x, u, h(x, u)) - f(x, u), absolute
template <SymmetricSystem S>
Residual pre_observer(const S& sys, const GainFunction<S>& gain, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto x = sys.sample_state(rng);
    const auto u = sys.sample_input(rng);
    r.add((observer_rhs(sys, gain, x, u, sys.output(x, u)) - sys.dynamics(x, u)).norm());
  }
  return r;
}

template <SymmetricSystem S>
Residual state_error_invariance(const S& sys, Rng& rng, long samples) {
  Residual r;
  for (long i = 0; i < samples; ++i) {
    const auto g = sys.sample_group(rng);
    const auto x = sys.sample_state(rng);
    const auto xh = sys.sample_state(rng);
    const typename S::Error a = invariant_state_error(sys, sys.act_state(g, x), sys.act_state(g, xh));
    const typename S::Error b = invariant_state_error(sys, x, xh);
    typename S::Error d = a - b;
    if constexpr (requires { sys.error_difference(a, b); }) d = sys.error_difference(a, b);
    r.add(d.norm() / std::max(1.0, b.norm()));
  }
  return r;
}

struct NamedCheck {
  std::string name;
  double threshold;
  std::function<Residual(Rng&, long)> run;
};

// The symmetry identities of one system, with their tolerances.
template <SymmetricSystem S>
std::vector<NamedCheck> symmetry_suite(const S& sys, const GainFunction<S>& gain) {
  return {
      {"group_axioms", 1e-12, [&sys](Rng& r, long n) { return group_axioms(sys, r, n); }},
      {"moving_frame_equivariance", 1e-10, [&sys](Rng& r, long n) { return moving_frame(sys, r, n); }},
      {"dynamics_invariance", 1e-10, [&sys](Rng& r, long n) { return dynamics_invariance(sys, r, n); }},
      {"output_equivariance", 1e-10, [&sys](Rng& r, long n) { return output_equivariance(sys, r, n); }},
      {"output_error_vanishes", 1e-12, [&sys](Rng& r, long n) { return output_error_zero(sys, r, n); }},
      {"output_error_invariance", 1e-10, [&sys](Rng& r, long n) { return output_error_invariance(sys, r, n); }},
      {"scalar_invariants", 1e-10, [&sys](Rng& r, long n) { return scalar_invariants(sys, r, n); }},
      {"frame_invariance", 1e-10, [&sys](Rng& r, long n) { return frame_invariance(sys, r, n); }},
      {"frame_condition_number", 1e8, [&sys](Rng& r, long n) { return frame_conditioning(sys, r, n); }},
      {"observer_invariance", 1e-8, [&sys, gain](Rng& r, long n) { return observer_invariance(sys, gain, r, n); }},
      {"pre_observer_identity", 1e-12, [&sys, gain](Rng& r, long n) { return pre_observer(sys, gain, r, n); }},
      {"state_error_invariance", 1e-10, [&sys](Rng& r, long n) { return state_error_invariance(sys, r, n); }},
  };
}

}  // namespace invobs::checks
