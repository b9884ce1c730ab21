#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <concepts>
#include <functional>
#include <sstream>

#include "invobs/errors.hpp"

namespace invobs {

// A system with a transformation group acting on states, inputs and outputs.
// States are ambient coordinate vectors of dimension n; the invariant frame
// has nf columns (nf < n when the state lives on a submanifold, as for the
// unit quaternion). Tangent vectors share the State type.
template <class S>
concept SymmetricSystem =
    requires(const S& s, const typename S::State& x, const typename S::Input& u,
             const typename S::Output& y, const typename S::Group& g) {
      typename S::Invariants;
      typename S::Frame;
      typename S::Error;
      { S::n } -> std::convertible_to<int>;
      { S::m } -> std::convertible_to<int>;
      { S::p } -> std::convertible_to<int>;
      { S::nf } -> std::convertible_to<int>;
      { s.dynamics(x, u) } -> std::convertible_to<typename S::State>;
      { s.output(x, u) } -> std::convertible_to<typename S::Output>;
      { s.act_state(g, x) } -> std::convertible_to<typename S::State>;
      { s.act_input(g, u) } -> std::convertible_to<typename S::Input>;
      { s.act_output(g, y) } -> std::convertible_to<typename S::Output>;
      { s.differential(g) } -> std::convertible_to<Eigen::Matrix<double, S::n, S::n>>;
      { s.compose(g, g) } -> std::convertible_to<typename S::Group>;
      { s.inverse(g) } -> std::convertible_to<typename S::Group>;
      { s.identity() } -> std::convertible_to<typename S::Group>;
      { s.group_distance(g, g) } -> std::convertible_to<double>;
      { s.moving_frame(x) } -> std::convertible_to<typename S::Group>;
      { s.invariant_frame(x) } -> std::convertible_to<typename S::Frame>;
      { s.scalar_invariants(x, u) } -> std::convertible_to<typename S::Invariants>;
      { s.output_error(x, u, y) } -> std::convertible_to<typename S::Output>;
      { s.in_domain(x) } -> std::convertible_to<bool>;
    };

template <class S>
using FrameGain = Eigen::Matrix<double, S::nf, S::p>;

// L̄(I, E): maps scalar invariants and the invariant output error to the
// nf x p correction gain expressed in the invariant frame.
template <class S>
using GainFunction =
    std::function<FrameGain<S>(const typename S::Invariants&, const typename S::Output&)>;

template <SymmetricSystem S>
GainFunction<S> constant_gain(const FrameGain<S>& L) {
  return [L](const typename S::Invariants&, const typename S::Output&) { return L; };
}

template <SymmetricSystem S>
void require_domain(const S& sys, const typename S::State& x, const char* where) {
  if (!sys.in_domain(x)) throw DomainError(std::string(where) + ": state outside the admissible domain");
}

// a - b, respecting angle wrapping or other chart conventions when the system
// declares them.
template <SymmetricSystem S>
typename S::State state_difference(const S& sys, const typename S::State& a,
                                   const typename S::State& b) {
  if constexpr (requires { sys.state_difference(a, b); }) {
    return sys.state_difference(a, b);
  } else {
    return a - b;
  }
}

// F(x̂,u,y) = f(x̂,u) + W(x̂) L̄(I(x̂,u), E(x̂,u,y)) E(x̂,u,y)
template <SymmetricSystem S>
typename S::State observer_rhs(const S& sys, const GainFunction<S>& gain,
                               const typename S::State& xh, const typename S::Input& u,
                               const typename S::Output& y) {
  require_domain(sys, xh, "observer_rhs");
  const typename S::Output E = sys.output_error(xh, u, y);
  const FrameGain<S> L = gain(sys.scalar_invariants(xh, u), E);
  if (!L.allFinite()) throw NumericError("observer_rhs: gain has non-finite entries");
  const typename S::Frame W = sys.invariant_frame(xh);
  return sys.dynamics(xh, u) + W * (L * E);
}

// φ_{γ(x)}(x̂) − φ_{γ(x)}(x), the generic invariant state error.
template <SymmetricSystem S>
typename S::State moving_frame_state_error(const S& sys, const typename S::State& x,
                                           const typename S::State& xh) {
  const typename S::Group g = sys.moving_frame(x);
  return state_difference(sys, sys.act_state(g, xh), sys.act_state(g, x));
}

template <SymmetricSystem S>
typename S::Error invariant_state_error(const S& sys, const typename S::State& x,
                                        const typename S::State& xh) {
  require_domain(sys, x, "invariant_state_error");
  require_domain(sys, xh, "invariant_state_error");
  if constexpr (requires { sys.state_error(x, xh); }) {
    return sys.state_error(x, xh);
  } else {
    return moving_frame_state_error(sys, x, xh);
  }
}

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Central differences with a per-coordinate step.
Eigen::MatrixXd fd_jacobian(const VectorMap& map, const Eigen::VectorXd& point,
                            const Eigen::VectorXd& steps);
Eigen::MatrixXd fd_jacobian(const VectorMap& map, const Eigen::VectorXd& point, double step);
// Step scaled by max(1, |x_i|) for coordinates of very different magnitude.
Eigen::MatrixXd fd_jacobian_relative(const VectorMap& map, const Eigen::VectorXd& point,
                                     double rel_step);

double condition_number(const Eigen::MatrixXd& M);

// L̄ = −W(x̄)⁻¹ L V⁻¹ with V = ∂E/∂y at (x̄, ū, h(x̄, ū)). The assembled observer
// then has the same first-order behaviour as the linear observer with gain L.
template <SymmetricSystem S>
FrameGain<S> invariantize_linear_gain(const S& sys, const typename S::State& xbar,
                                      const typename S::Input& ubar,
                                      const Eigen::Matrix<double, S::n, S::p>& L,
                                      double eq_tol = 1e-9) {
  static_assert(S::nf == S::n, "linear-gain invariantization needs a square invariant frame");
  require_domain(sys, xbar, "invariantize_linear_gain");
  const typename S::State f = sys.dynamics(xbar, ubar);
  if (!(f.norm() <= eq_tol)) {
    std::ostringstream os;
    os << "invariantize_linear_gain: (x, u) is not an equilibrium, |f| = " << f.norm();
    throw NumericError(os.str());
  }
  const Eigen::MatrixXd W = sys.invariant_frame(xbar);
  const typename S::Output ybar = sys.output(xbar, ubar);
  const VectorMap E_of_y = [&](const Eigen::VectorXd& yy) -> Eigen::VectorXd {
    const typename S::Output yo = yy;
    return sys.output_error(xbar, ubar, yo);
  };
  const Eigen::MatrixXd V = fd_jacobian_relative(E_of_y, ybar, 1e-6);
  const double cw = condition_number(W);
  const double cv = condition_number(V);
  if (!(cw < 1e12) || !(cv < 1e12)) {
    std::ostringstream os;
    os << "invariantize_linear_gain: singular frame or output-error map (cond W = " << cw
       << ", cond V = " << cv << ")";
    throw NumericError(os.str());
  }
  const Eigen::MatrixXd Lbar = -W.inverse() * L * V.inverse();
  return Lbar;
}

}  // namespace invobs
