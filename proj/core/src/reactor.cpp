#include "invobs/reactor.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>

namespace invobs::reactor {

double Reactor::rate(double T) const { return std::exp(-p_.ea_over_r / T); }

bool Reactor::in_domain(const State& s) const {
  return s.allFinite() && s[0] > 0.0 && s[1] > 0.0 && s[2] > 0.0;
}

Reactor::State Reactor::dynamics(const State& s, const Input& in) const {
  require_domain(*this, s, "reactor dynamics");
  const double f = rate(s[2]);
  const double c = in[0], D = in[1], Tin = in[2], v = in[3];
  return {0.0, D * (s[0] - s[1]) - p_.k * f * s[1], D * (Tin - s[2]) + c * f * s[1] + v};
}

Eigen::Matrix3d Reactor::differential(const Group& g) const {
  return Eigen::Vector3d(g.g, g.g, 1.0).asDiagonal();
}

double Reactor::group_distance(const Group& a, const Group& b) const {
  return std::abs(std::log(a.g) - std::log(b.g));
}

Scale Reactor::moving_frame(const State& s) const {
  require_domain(*this, s, "reactor moving frame");
  return {1.0 / s[1]};
}

Reactor::Frame Reactor::invariant_frame(const State& s) const {
  require_domain(*this, s, "reactor invariant frame");
  return Eigen::Vector3d(s[0], s[1], 1.0).asDiagonal();
}

Reactor::Invariants Reactor::scalar_invariants(const State& sh, const Input& in) const {
  if (!(sh[1] > 0.0)) throw DomainError("reactor invariants: X must be positive");
  Invariants I;
  I << sh[0] / sh[1], sh[2], in[0] * sh[1], in[1], in[2], in[3];
  return I;
}

Reactor::Error Reactor::state_error(const State& x, const State& xh) const {
  return {std::log(xh[1] / x[1]), std::log(xh[1] / xh[0]) - std::log(x[1] / x[0]), xh[2] - x[2]};
}

Eigen::Vector3d Reactor::to_chart(const State& s) const {
  require_domain(*this, s, "reactor base/fiber chart");
  return {std::log(s[1]), std::log(s[1] / s[0]), s[2]};
}

Reactor::State Reactor::from_chart(const Eigen::Vector3d& z) const {
  return {std::exp(z[0] - z[1]), std::exp(z[0]), z[2]};
}

Eigen::Vector3d Reactor::chart_dynamics(const Eigen::Vector3d& z, const Input& in) const {
  if (!chart_in_domain(z)) throw DomainError("reactor chart dynamics: temperature must be positive");
  const double f = rate(z[2]);
  const double c = in[0], D = in[1], Tin = in[2], v = in[3];
  const double dz = D * (std::exp(-z[1]) - 1.0) - p_.k * f;
  return {dz, dz, D * (Tin - z[2]) + c * f * std::exp(z[0]) + v};
}

Reactor::State Reactor::sample_state(Rng& rng) const {
  return {std::pow(10.0, rng.uniform(-1, 1)), std::pow(10.0, rng.uniform(-1.5, 0.5)), rng.uniform(260, 340)};
}

Reactor::Input Reactor::sample_input(Rng& rng) const {
  return {std::pow(10.0, rng.uniform(11, 12.7)), rng.uniform(0.0, 0.2), rng.uniform(260, 320), rng.uniform(-1, 1)};
}

Reactor::Output Reactor::sample_output(Rng& rng) const { return Output(rng.uniform(260, 340)); }

Scale Reactor::sample_group(Rng& rng) const { return {std::pow(10.0, rng.uniform(-3, 3))}; }

double rate_divided_difference(double ea_over_r, double That, double E) {
  const double T = That - E;
  if (!(That > 0.0) || !(T > 0.0)) throw DomainError("rate divided difference: temperatures must be positive");
  const double s = ea_over_r / (That * T);
  const double z = -E * s;
  const double ratio = (z == 0.0) ? 1.0 : std::expm1(z) / z;
  return std::exp(-ea_over_r / That) * s * ratio;
}

Reactor::State observer_rhs_global(const Reactor& sys, const Reactor::State& sh,
                                   const Reactor::Input& in, double y, const Gains& g) {
  require_domain(sys, sh, "reactor observer");
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("reactor observer: measured temperature must be positive");
  const double f = sys.rate(y);
  const double E = sh[2] - y;
  const double c = in[0], D = in[1], Tin = in[2], v = in[3];
  const double k = sys.params().k;
  const double cx = c * sh[1];
  return {-g.beta * f * E * cx * sh[0],
          D * (sh[0] - sh[1]) - f * (k + g.beta * E * cx) * sh[1],
          f * (1.0 - g.kappa * E) * cx + D * (Tin - y) + v};
}

GainFunction<Reactor> global_gain(const Reactor& sys, const Gains& g) {
  const Params p = sys.params();
  return [p, g](const Reactor::Invariants& I, const Reactor::Output& Ev) {
    const double That = I[1], cx = I[2], D = I[3], E = Ev[0];
    const double T = That - E;
    if (!(T > 0.0)) throw DomainError("reactor gain: measured temperature must be positive");
    const double fT = std::exp(-p.ea_over_r / T);
    const double dd = rate_divided_difference(p.ea_over_r, That, E);
    FrameGain<Reactor> L;
    L << -g.beta * cx * fT,
         p.k * dd - g.beta * cx * fT,
         -cx * dd - g.kappa * cx * fT + D;
    return L;
  };
}

Eigen::Vector3d error_dynamics(const Eigen::Vector3d& eta, double Z, double xi, double T,
                               const Reactor::Input& in, const Gains& g, const Params& p) {
  const double c = in[0], D = in[1];
  const double r = c * std::exp(-p.ea_over_r / T + Z);
  const double eps = D * (std::exp(-(xi + eta[1])) - std::exp(-xi));
  const double ez = std::exp(eta[0]);
  return {eps - g.beta * r * ez * eta[2], eps, r * (ez - 1.0) - g.kappa * r * ez * eta[2]};
}

double lyapunov(double Z_tilde, double T_tilde, double beta) {
  return Z_tilde + std::exp(-Z_tilde) + 0.5 * beta * T_tilde * T_tilde;
}

namespace {

struct EnergyBalance {
  const Reactor& sys;
  double c, D, Tin, v, x_in;
  double X(double T) const { return D * x_in / (D + sys.params().k * sys.rate(T)); }
  double operator()(double T) const { return D * (Tin - T) + v + c * sys.rate(T) * X(T); }
};

void bracket(const EnergyBalance& g, double& lo, double& hi) {
  lo = g.Tin + g.v / g.D;
  if (!(lo > 0.0)) lo = 1e-3;
  hi = g.Tin + std::max(g.v, 0.0) / g.D + g.c * g.x_in / g.sys.params().k + 1.0;
}

}  // namespace

Reactor::State equilibrium(const Reactor& sys, const Reactor::Input& in, double x_in) {
  if (!(in[1] > 0.0)) throw ValidationError("reactor equilibrium: needs D > 0");
  if (!(x_in > 0.0) || !(in[0] > 0.0)) throw ValidationError("reactor equilibrium: needs X_in > 0 and c > 0");
  const EnergyBalance g{sys, in[0], in[1], in[2], in[3], x_in};
  double lo, hi;
  bracket(g, lo, hi);
  const double glo = g(lo), ghi = g(hi);
  double T;
  if (glo == 0.0) {
    T = lo;
  } else {
    if (!(glo > 0.0 && ghi < 0.0)) throw NumericError("reactor equilibrium: energy balance not bracketed");
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    T = 0.5 * (r.first + r.second);
  }
  return {x_in, g.X(T), T};
}

int count_equilibria(const Reactor& sys, const Reactor::Input& in, double x_in) {
  const EnergyBalance g{sys, in[0], in[1], in[2], in[3], x_in};
  double lo, hi;
  bracket(g, lo, hi);
  const int N = 20000;
  int changes = 0;
  double prev = g(lo);
  for (int i = 1; i <= N; ++i) {
    const double cur = g(lo + (hi - lo) * i / N);
    if ((prev > 0.0) != (cur > 0.0)) ++changes;
    prev = cur;
  }
  return changes;
}

}  // namespace invobs::reactor
