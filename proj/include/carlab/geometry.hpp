#pragma once

#include "carlab/params.hpp"
#include "carlab/vec.hpp"

namespace carlab {

// A binary collision in the sigma-representation.
struct CollisionConfig {
  Velocity v;
  Velocity v_star;
  Velocity sigma;  // unit vector
};

struct PostCollision {
  Velocity v_prime;
  Velocity v_prime_star;
};

// Tolerance on |sigma| - 1 accepted as a unit vector.
inline constexpr double kUnitTolerance = 1e-12;
// Relative tolerance (scaled by |v' - v|) for hyperplane membership.
inline constexpr double kHyperplaneTolerance = 1e-9;

// v' = (v+v_*)/2 + |v-v_*|/2 sigma and v'_* = (v+v_*)/2 - |v-v_*|/2 sigma.
PostCollision post_collision(const CollisionConfig& cfg);

// Deviation angle theta in [0, pi] with cos(theta) = (v-v_*)/|v-v_*| . sigma.
double deviation_angle(const CollisionConfig& cfg);

// sin(theta/2) = (v'-v)/|v'-v| . sigma, the half-angle form of the deviation
// angle. Returns 0 for the grazing configuration v' = v.
double half_angle_sine(const CollisionConfig& cfg);

// Reconstructs sigma = (v' - v'_*)/|v' - v'_*| from a post-collisional pair.
Velocity reconstruct_sigma(const PostCollision& post);

// Deviation angle of the configuration (v, v', v'_*) used by the Carleman
// parametrization: tan(theta/2) = |v - v'| / |v - v'_*|.
double carleman_angle(double dist_v_vprime, double dist_v_vprimestar) noexcept;

// Integrand weight of the Carleman representation for a single hyperplane
// point: |v-v'|^{-(d-1)-2s} |v-v'_*|^{gamma+2s+1} b~(cos theta) / |v'-v|.
// v'_* must lie on the hyperplane through v orthogonal to v' - v.
double carleman_weights(const Velocity& v, const Velocity& v_prime, const Velocity& v_prime_star,
                        const KernelParams& params);

}  // namespace carlab
