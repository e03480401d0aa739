#pragma once

#include <functional>
#include <string>
#include <vector>

#include "carlab/collision_operator.hpp"
#include "carlab/field.hpp"
#include "carlab/params.hpp"

namespace carlab {

struct HydroDiagnostics {
  double mass = 0.0;
  double energy = 0.0;   // int f |v|^2
  double entropy = 0.0;  // int f log f, 0 log 0 = 0
};

HydroDiagnostics hydro_diagnostics(const DistributionField& f);

// 0 < m0 <= mass <= M0, energy <= E0, entropy <= H0.
struct HydroBounds {
  double m0 = 0.0;
  double M0 = 0.0;
  double E0 = 0.0;
  double H0 = 0.0;

  void validate() const;
};

struct HydroReport {
  HydroDiagnostics measured;
  bool mass_lower = false;
  bool mass_upper = false;
  bool energy = false;
  bool entropy = false;

  bool all() const noexcept { return mass_lower && mass_upper && energy && entropy; }
};

HydroReport check_hydro_bounds(const DistributionField& f, const HydroBounds& bounds);

// Minimum of f over the nodes with |v| <= R.
double measure_plateau(const DistributionField& f, double R);

// Right-hand side of d/dt f = Q(f, f).
using Rhs = std::function<GridFunction(const DistributionField&)>;

struct StepResult {
  DistributionField f;
  double dt = 0.0;  // step actually taken
  int halvings = 0;
  // Mass removed by clamping values in [-1e-12 sup f, 0) to zero.
  double clamped_mass = 0.0;
};

// Operator options used when the solver builds its own operator
// (positivity-preserving interpolation).
OperatorOptions stepping_options();

// Explicit midpoint step. A step producing a value below -1e-12 sup f (at the
// half or full stage) is rejected and dt halved, at most 10 times; after that
// StiffnessError is thrown with a dump of the offending state.
StepResult step(const DistributionField& f, double dt, const Rhs& rhs);
StepResult step(const DistributionField& f, double dt, const CollisionOperator& op);
StepResult step(const DistributionField& f, double dt, const KernelParams& params);

struct SolveTrace {
  std::vector<double> t;
  std::vector<double> mass;
  std::vector<double> energy;
  std::vector<double> entropy;
  std::vector<double> sup_f;
  std::vector<double> dt;  // step that led to the row; 0 on the first row
  std::vector<double> clamped_mass;
  std::vector<double> plateau_radii;
  std::vector<std::vector<double>> plateau;  // plateau[k][row] on radius k

  double mass_drift = 0.0;    // max |m(t) - m(0)| / m(0)
  double energy_drift = 0.0;  // max |E(t) - E(0)| / E(0)
  double max_entropy_increase = 0.0;
  bool drift_flag = false;    // a drift exceeded the tolerance
  bool entropy_flag = false;  // entropy rose by more than the tolerance in a step

  std::size_t rows() const noexcept { return t.size(); }
};

struct SolveOptions {
  double dt_init = 1e-3;
  // Times the integrator lands on exactly (snapshot times).
  std::vector<double> stop_times;
  std::vector<double> plateau_radii{1.0};
  double drift_tolerance = 0.01;
  double entropy_tolerance = 1e-3;
  // Called on the initial state and after every accepted step.
  std::function<void(double, const DistributionField&)> observer;
};

struct SolveResult {
  DistributionField f;
  SolveTrace trace;
};

SolveResult solve(const DistributionField& f0, double t_end, const CollisionOperator& op,
                  const SolveOptions& opts = {});
SolveResult solve(const DistributionField& f0, double t_end, const Rhs& rhs,
                  const SolveOptions& opts = {});
// Builds the operator with stepping_options().
SolveResult solve(const DistributionField& f0, double t_end, const KernelParams& params,
                  const SolveOptions& opts = {});

}  // namespace carlab
