#pragma once

#include <Eigen/Dense>

#include "invobs/group_core.hpp"
#include "invobs/noise.hpp"

// Exothermic continuous stirred reactor with an unknown inlet concentration,
// symmetric under a change of material units X -> gX.
//
// State (X_in, X, T), input (c, D, T_in, v), output the temperature T.
// The exothermicity c sits in the input vector because the unit change
// acts on it (c -> c/g).
namespace invobs::reactor {

struct Params {
  double ea_over_r = 8750.0;  // E_A / R [K]
  double k = 7.2e10;          // [1/s]
};

struct Gains {
  double beta = 0.04;
  double kappa = 1.0;
};

struct Scale {
  double g = 1.0;
};

class Reactor {
 public:
  static constexpr int n = 3, m = 4, p = 1, nf = 3, ni = 6;
  using State = Eigen::Vector3d;                // X_in, X, T
  using Input = Eigen::Vector4d;                // c, D, T_in, v
  using Output = Eigen::Matrix<double, 1, 1>;   // T
  using Invariants = Eigen::Matrix<double, 6, 1>;
  using Frame = Eigen::Matrix3d;
  using Error = Eigen::Vector3d;                // Z~, xi~, T~
  using Group = Scale;

  Reactor() = default;
  explicit Reactor(const Params& p) : p_(p) {}
  const Params& params() const { return p_; }

  // exp(-E_A / (R T))
  double rate(double T) const;

  State dynamics(const State& s, const Input& in) const;
  Output output(const State& s, const Input&) const { return Output(s[2]); }

  State act_state(const Group& g, const State& s) const { return {g.g * s[0], g.g * s[1], s[2]}; }
  Input act_input(const Group& g, const Input& in) const { return {in[0] / g.g, in[1], in[2], in[3]}; }
  Output act_output(const Group&, const Output& y) const { return y; }
  Eigen::Matrix3d differential(const Group& g) const;

  Group compose(const Group& a, const Group& b) const { return {a.g * b.g}; }
  Group inverse(const Group& g) const { return {1.0 / g.g}; }
  Group identity() const { return {}; }
  double group_distance(const Group& a, const Group& b) const;

  Group moving_frame(const State& s) const;
  Frame invariant_frame(const State& s) const;
  // (X̂_in/X̂, T̂, c X̂, D, T_in, v)
  Invariants scalar_invariants(const State& sh, const Input& in) const;
  Output output_error(const State& sh, const Input&, const Output& y) const { return Output(sh[2] - y[0]); }

  // (log(X̂/X), log(X̂/X̂_in) - log(X/X_in), T̂ - T)
  Error state_error(const State& x, const State& xh) const;

  bool in_domain(const State& s) const;
  State state_difference(const State& a, const State& b) const { return a - b; }

  // Truth chart (Z, xi, T) = (log X, log(X/X_in), T).
  Eigen::Vector3d to_chart(const State& s) const;
  State from_chart(const Eigen::Vector3d& z) const;
  Eigen::Vector3d chart_dynamics(const Eigen::Vector3d& z, const Input& in) const;
  bool chart_in_domain(const Eigen::Vector3d& z) const { return z.allFinite() && z[2] > 0.0; }

  State sample_state(Rng& rng) const;
  Input sample_input(Rng& rng) const;
  Output sample_output(Rng& rng) const;
  Group sample_group(Rng& rng) const;

 private:
  Params p_;
};

inline Eigen::Vector3d to_base_fiber(const Reactor::State& s) { return Reactor{}.to_chart(s); }
inline Reactor::State from_base_fiber(const Eigen::Vector3d& z) { return Reactor{}.from_chart(z); }

// (f(T̂) - f(T̂ - E)) / E for f(T) = exp(-a/T), evaluated without cancellation.
double rate_divided_difference(double ea_over_r, double That, double E);

// Closed-form nonlinear observer driven by the measured temperature y.
Reactor::State observer_rhs_global(const Reactor& sys, const Reactor::State& sh,
                                   const Reactor::Input& in, double y, const Gains& g);

// The same observer written as L̄(I, E) for the generic assembly.
GainFunction<Reactor> global_gain(const Reactor& sys, const Gains& g);

// Invariant error field. The trajectory enters through (Z, xi, T) and the input.
Eigen::Vector3d error_dynamics(const Eigen::Vector3d& eta, double Z, double xi, double T,
                               const Reactor::Input& in, const Gains& g, const Params& p);

double lyapunov(double Z_tilde, double T_tilde, double beta);

// Steady state at constant input (D > 0) for a given inlet concentration.
Reactor::State equilibrium(const Reactor& sys, const Reactor::Input& in, double x_in);
// Number of steady states found by a sign scan of the energy balance.
int count_equilibria(const Reactor& sys, const Reactor::Input& in, double x_in);

}  // namespace invobs::reactor
