#pragma once

#include <vector>

#include "carlab/field.hpp"
#include "carlab/params.hpp"

namespace carlab {

// Direct sigma-representation integrals with the angular cutoff theta >= theta_m,
// evaluated for theta_m in {4, 2, 1} x params.theta_min and extrapolated to
// theta_m -> 0 assuming I(theta_m) = I* + c1 theta_m^{2-2s} + c2 theta_m^{4-2s}.
struct SigmaOracleOptions {
  int nodes_per_panel = 8;
  // Azimuthal nodes of sigma around v - v_* (d = 3 only).
  int azimuth_nodes = 16;
  // Cancellation side: angular and radial resolution of the polar v_* rule.
  int polar_angles = 256;
  int radial_panels = 16;
};

struct SigmaOracleResult {
  GridFunction extrapolated;
  // Truncated integrals for theta_m = 4, 2, 1 times theta_min.
  std::vector<GridFunction> truncated;
  std::vector<double> theta_mins;
};

// Geometric panel boundaries in theta: theta_m, 2 theta_m, ... up to pi/2, then
// halving distances to pi when refine_to_pi is set (down to 1e-4), and pi.
std::vector<double> theta_panels(double theta_m, bool refine_to_pi);

// Weights (w4, w2, w1) with I* = w4 I(4t) + w2 I(2t) + w1 I(t).
std::vector<double> richardson_weights(double s);

// Integrand of Q(f, f) at v for a single partner v_*, integrated over sigma on
// theta >= theta_m: int [f(v') f(v'_*) - f(v) f(v_*)] |v - v_*|^gamma b dsigma.
// Symmetric in (v, v_*). f is sampled with cubic interpolation.
double sigma_pair_integrand(const Velocity& v, const Velocity& v_star, const DistributionField& f,
                            const KernelParams& params, double theta_m,
                            const SigmaOracleOptions& opts = {});

// Q(f, f) at every node from the sigma form, v_* on the lattice v + k h (the
// lattice extends beyond the grid box as far as the gain term can reach).
SigmaOracleResult q_sigma_oracle(const DistributionField& f, const KernelParams& params,
                                 const SigmaOracleOptions& opts = {});

// Same integral for an analytic density: f is evaluated exactly (zero outside
// the grid box) instead of being interpolated from nodal values.
SigmaOracleResult q_sigma_oracle(const Density& rho, const VelocityGrid& grid, const KernelParams& params,
                                 const SigmaOracleOptions& opts = {});

// int int [f(v'_*) - f(v_*)] |v - v_*|^gamma b dv_* dsigma at v, with v_* in
// polar coordinates around v. Returns the extrapolated value.
double cancellation_sigma(const Velocity& v, const DistributionField& f, const KernelParams& params,
                          const SigmaOracleOptions& opts = {});

}  // namespace carlab
