#ifndef FORBEARANCE_SRC_CHECKS_HPP
#define FORBEARANCE_SRC_CHECKS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace forbearance::detail {

inline void require_finite(const char* name, double v) {
  if (!std::isfinite(v)) {
    throw std::domain_error(std::string(name) + " must be finite");
  }
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace forbearance::detail

#endif  // FORBEARANCE_SRC_CHECKS_HPP
