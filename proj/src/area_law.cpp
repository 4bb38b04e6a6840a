#include "kolcouple/area_law.hpp"

#include <cmath>
#include <stdexcept>

#include "kolcouple/special.hpp"

namespace kolcouple {

AreaLaw::AreaLaw(double start_height) : a(start_height) {
  if (a <= 0.0) throw std::invalid_argument("AreaLaw: start height must be positive");
}

double AreaLaw::density(double u) const {
  if (u <= 0.0) throw std::invalid_argument("AreaLaw::density: u must be positive");
  const double c = std::pow(2.0, 1.0 / 3.0) /
                   (std::pow(3.0, 2.0 / 3.0) * std::tgamma(1.0 / 3.0));
  return c * a * std::pow(u, -4.0 / 3.0) * std::exp(-2.0 * a * a * a / (9.0 * u));
}

double AreaLaw::tail(double t) const {
  if (t <= 0.0) throw std::invalid_argument("AreaLaw::tail: t must be positive");
  return gamma_p(1.0 / 3.0, 2.0 * a * a * a / (9.0 * t));
}

}  // namespace kolcouple
