#include "invobs/simulate.hpp"

namespace invobs {

long step_count(double dt, double duration) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("simulate: dt must be positive and finite");
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw ValidationError("simulate: duration must be nonnegative and finite");
  const double ratio = duration / dt;
  const double N = std::round(ratio);
  if (std::abs(ratio - N) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os.precision(17);
    os << "simulate: dt = " << dt << " does not divide duration = " << duration;
    throw ValidationError(os.str());
  }
  return static_cast<long>(N);
}

}  // namespace invobs
