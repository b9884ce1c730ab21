#include "invobs/errors.hpp"

namespace invobs {

NumericError::NumericError(const std::string& what, double t)
    : std::runtime_error(what), t_(t) {}

}  // namespace invobs
