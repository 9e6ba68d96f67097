#include "iclt/sde_params.hpp"

#include <cmath>
#include <stdexcept>

namespace iclt {

SdeParams::SdeParams(double a, double b, double sigma) : a_(a), b_(b), sigma_(sigma) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(sigma))
    throw std::invalid_argument("SDE parameters must be finite");
  if (!(a > b)) throw std::invalid_argument("SDE parameters require a > b");
  if (!(sigma > 0.0)) throw std::invalid_argument("SDE parameters require sigma > 0");
}

}  // namespace iclt
