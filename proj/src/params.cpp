#include "carlab/params.hpp"

#include <cmath>
#include <string>

#include "carlab/errors.hpp"

namespace carlab {

AngularProfile AngularProfile::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ConfigError("constant angular profile must be positive and finite");
  return AngularProfile({value});
}

AngularProfile AngularProfile::cos_polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw ConfigError("angular profile needs at least one coefficient");
  for (double c : coefficients)
    if (!std::isfinite(c)) throw ConfigError("angular profile coefficients must be finite");
  while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();
  return AngularProfile(std::move(coefficients));
}

double AngularProfile::operator()(double cos_theta) const noexcept {
  // Horner in cos(theta).
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * cos_theta + *it;
  return acc;
}

void KernelParams::validate() const {
  if (d != 2 && d != 3) throw ConfigError("d must be 2 or 3, got " + std::to_string(d));
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("s must lie in (0,1)");
  if (!std::isfinite(gamma) || !(gamma > -d)) throw ConfigError("gamma must be finite and > -d");
  const double g2s = gamma + 2.0 * s;
  if (g2s < 0.0 || g2s > 2.0) throw ConfigError("gamma + 2s must lie in [0,2]");
  if (theta_min && !(*theta_min > 0.0 && *theta_min < M_PI))
    throw ConfigError("theta_min must lie in (0, pi)");
  if (hyperplane_nodes < 2) throw ConfigError("hyperplane_nodes must be at least 2");
  // Positivity of the smooth factor on [0, pi): a dense scan is enough for the
  // low-degree polynomials accepted here.
  constexpr int kScan = 4096;
  for (int k = 0; k < kScan; ++k) {
    const double theta = M_PI * k / kScan;
    if (!(tilde_b(std::cos(theta)) > 0.0))
      throw ConfigError("tilde_b must be strictly positive on [0, pi)");
  }
}

}  // namespace carlab
