#pragma once

#include <memory>
#include <vector>

#include "carlab/field.hpp"
#include "carlab/kernel.hpp"
#include "carlab/params.hpp"
#include "carlab/quadrature.hpp"

namespace carlab {

// kPolar integrates the symmetrized PV in polar coordinates around each node
// (fine angular rule, cubic interpolation of g along rays); kLattice is the
// second-difference sum over lattice offsets with cell and tail corrections.
enum class PVScheme { kPolar, kLattice };

struct OperatorOptions {
  PVScheme scheme = PVScheme::kPolar;
  // Directions per half circle (d = 2); Gauss nodes in cos(theta) on the
  // hemisphere are polar_directions / 8 in d = 3.
  int polar_directions = 128;
  // Gauss nodes per radial panel; panels are one cell wide.
  int radial_nodes = 4;
  // Polar scheme: clamp the interpolant of a nonnegative g at 0, so that
  // Q_s(f, g) >= 0 wherever g = 0. Needed for positivity in time stepping;
  // costs accuracy and conservation next to a compact support.
  bool positivity_preserving = false;
  PVQuadratureSpec pv;
  // Angular nodes for the excluded-cell and far-field integrals (per half
  // circle in d = 2, Gauss nodes in cos(theta) on the hemisphere in d = 3).
  int correction_directions = 64;
  // Radial Gauss nodes for those integrals when b~ is not constant.
  int correction_radial_nodes = 8;
  // Worker threads for node-parallel loops; 0 keeps the OpenMP default.
  int threads = 0;
};

// Carleman-form collision operator on a fixed grid. The lattice geometry
// (primitive directions and their multiples) is built once and shared; all
// evaluation methods are const and may be called concurrently.
class CollisionOperator {
 public:
  CollisionOperator(const VelocityGrid& grid, const KernelParams& params, OperatorOptions opts = {});
  ~CollisionOperator();
  CollisionOperator(CollisionOperator&&) noexcept;
  CollisionOperator& operator=(CollisionOperator&&) noexcept;

  const VelocityGrid& grid() const noexcept;
  const KernelParams& params() const noexcept;
  const OperatorOptions& options() const noexcept;
  const CancellationConstant& cancellation() const noexcept;

  // Q_s(f, g)(v) = PV int K_f(v, v') [g(v') - g(v)] dv' at every node.
  GridFunction q_singular(const DistributionField& f, const GridFunction& g) const;
  // Same kernel K_f applied to several difference fields at once.
  std::vector<GridFunction> q_singular(const DistributionField& f,
                                       const std::vector<GridFunction>& gs) const;
  // (f * S)(v) with S(u) = C_S |u|^gamma.
  GridFunction convolution_with_S(const DistributionField& f) const;
  // Q_ns(f, g) = g (f * S).
  GridFunction q_nonsingular(const DistributionField& f, const GridFunction& g) const;
  // Q(f, f) = Q_s(f, f) + Q_ns(f, f).
  GridFunction q_full(const DistributionField& f) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrappers building a one-off operator.
GridFunction q_singular(const DistributionField& f, const GridFunction& g, const KernelParams& params);
GridFunction q_nonsingular(const DistributionField& f, const GridFunction& g,
                           const KernelParams& params);
GridFunction q_full(const DistributionField& f, const KernelParams& params);

}  // namespace carlab
