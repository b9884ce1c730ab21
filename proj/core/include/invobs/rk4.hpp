#pragma once

#include <sstream>

#include "invobs/errors.hpp"

namespace invobs {

// Classical fourth-order Runge-Kutta step for ds/dt = f(t, s).
template <class State, class Field>
State rk4_step(const Field& f, double t, const State& s, double dt) {
  if (!(dt > 0.0)) throw ValidationError("rk4_step: dt must be positive");
  auto eval = [&](double tt, const State& x) -> State {
    State k = f(tt, x);
    if (!k.allFinite()) {
      std::ostringstream os;
      os << "rk4_step: non-finite tangent at t = " << tt;
      throw NumericError(os.str(), tt);
    }
    return k;
  };
  const State k1 = eval(t, s);
  const State k2 = eval(t + 0.5 * dt, State(s + 0.5 * dt * k1));
  const State k3 = eval(t + 0.5 * dt, State(s + 0.5 * dt * k2));
  const State k4 = eval(t + dt, State(s + dt * k3));
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace invobs
