#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "carlab/field.hpp"
#include "carlab/params.hpp"

namespace carlab {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
// Cached per n; safe to call concurrently.
const GaussRule& gauss_legendre(int n);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b]. Throws NumericalError when the
// estimated relative error exceeds rel_tol after max_depth bisections.
QuadResult adaptive_integral(const std::function<double(double)>& f, double a, double b,
                             double rel_tol = 1e-12, unsigned max_depth = 30);

// Quadrature over the unit sphere S^{d-1}: directions and weights summing to
// |S^{d-1}|. With `half`, only directions with canonical sign are kept and
// weights are doubled (exact for even integrands).
struct SphereRule {
  std::vector<Velocity> dirs;
  std::vector<double> w;
};
// d = 2: n equispaced angles. d = 3: n Gauss nodes in cos(theta) times 2n
// equispaced azimuths. `half` keeps the hemisphere x_1 > 0 (d = 2: the
// right half-circle) with doubled weights: exact full-sphere sums for even
// integrands.
SphereRule sphere_rule(int d, int n, bool half);

// Options of the principal-value lattice sum.
struct PVQuadratureSpec {
  // Offsets with |w| < inner_exclusion_radius * h are skipped.
  double inner_exclusion_radius = 1.0;
  // The PV sum is always symmetrized; kept as a field for the config echo.
  bool symmetrization = true;
  // Add the Taylor estimate of the integral over the excluded cell.
  bool near_field_correction = true;
  // Add the integral of -2 g(v) K beyond the offset lattice (zero extension).
  bool far_field_tail = true;

  void validate() const;
};

// Symmetrized second-difference lattice sum
//   sum_{w in half-space offsets} K(w) [g(v+w) + g(v-w) - 2 g(v)] h^d
// at node `node`, with g extended by zero outside the grid. K(w) must return
// K(v, v + w) and be even in w. No corrections are applied here.
template <class KernelFn>
double pv_integral(const GridFunction& g, std::size_t node, const KernelFn& K,
                   const PVQuadratureSpec& spec = {});

// Integral of |w|^2 K_f(v, v+w) over |w| < r, by polar quadrature.
double ball_second_moment(const Velocity& v, double r, const DistributionField& f,
                          const KernelParams& params, int angular_nodes = 64, int radial_nodes = 16);
// Integral of K_f(v, v+w) over |w| > r, by polar quadrature.
double tail_mass(const Velocity& v, double r, const DistributionField& f,
                 const KernelParams& params, int angular_nodes = 64, int radial_nodes = 16);

struct ConeVolumes {
  double vol_C = 0.0;
  double vol_Cstar = 0.0;
  double se_C = 0.0;
  double se_Cstar = 0.0;
  std::uint64_t accepted = 0;
};

// Monte Carlo volumes of the non-grazing cone: v' in B_R whose line through
// v0 stays farther than R(1 - xi/2) from 0, and the mean (d-1)-volume of the
// hyperplane slice {v'_* in B_R : (v'_* - v0).(v' - v0) = 0} over that set.
ConeVolumes cone_volume_mc(double R, double xi, const Velocity& v0, std::uint64_t n_samples,
                           std::uint64_t seed);

// Uniform double in [0, 1) from 53 random bits; portable across standard libraries.
inline double uniform01(std::uint64_t bits) noexcept { return (bits >> 11) * 0x1.0p-53; }

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace carlab

#include "carlab/detail/pv_integral.hpp"
