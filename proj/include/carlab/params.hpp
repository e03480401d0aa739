#pragma once

#include <optional>
#include <vector>

namespace carlab {

// The smooth angular factor \tilde b(cos theta). Either a constant or a
// polynomial in cos theta; it must stay positive on [0, pi).
class AngularProfile {
 public:
  static AngularProfile constant(double value = 1.0);
  static AngularProfile cos_polynomial(std::vector<double> coefficients);

  double operator()(double cos_theta) const noexcept;
  bool is_constant() const noexcept { return coeffs_.size() == 1; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }

 private:
  explicit AngularProfile(std::vector<double> c) : coeffs_(std::move(c)) {}
  std::vector<double> coeffs_{1.0};
};

// Parameters of the collision kernel B(r, cos theta) = r^gamma b(cos theta).
struct KernelParams {
  int d = 2;
  double gamma = 0.0;
  double s = 0.5;
  AngularProfile tilde_b = AngularProfile::constant(1.0);
  // Angular cutoff for the sigma-representation oracles.
  std::optional<double> theta_min;
  // Midpoint nodes per hyperplane direction in the Carleman kernel.
  int hyperplane_nodes = 64;

  // Throws ConfigError when an invariant is violated.
  void validate() const;

  // Exponent gamma + 2s + 1 of |v - v'_*| in the Carleman kernel.
  double carleman_exponent() const noexcept { return gamma + 2.0 * s + 1.0; }
  // Exponent q = d + 2(gamma + 2s + 1) of the spreading lemma.
  double spreading_q() const noexcept { return d + 2.0 * carleman_exponent(); }
};

}  // namespace carlab
