#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "carlab/field.hpp"
#include "carlab/params.hpp"

namespace carlab {

// One checked estimate. Every check is phrased as "measured_exponent within
// tolerance of expected_exponent": regression slopes directly, refinement
// studies and oracle comparisons as a relative change/error against 0.
struct EstimateReport {
  std::string name;
  std::string sweep;
  double measured_constant = 0.0;
  double measured_exponent = 0.0;
  double expected_exponent = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> details;

  // pass = |measured - expected| <= tolerance and measured_constant finite.
  void finalize();
};

std::vector<double> default_r_sweep();               // 0.2 .. 1.0, 7 geometric points
std::vector<Velocity> default_v_sweep(int d);        // (0), (0.5, 0..), (2, 0..)
std::vector<double> default_xi_sweep();              // 0.02 .. 0.2, 6 geometric points
std::vector<double> default_lambda_norms();          // |v| = 10 .. 1000, 9 geometric points
std::vector<Velocity> default_u_sweep(int d, double v_max);  // cancellation sample nodes

// Relative change |b - a| / max(|a|, |b|), 0 when both vanish.
double relative_change(double a, double b);

// Kernel bounds on f = rho rasterized on `grid` (and on the grid with 2n nodes when
// `refine`): ball_second_moment ~ Lambda r^{2-2s} and tail_mass ~ Lambda r^{-2s}.
// Reports: inner and outer exponents (worst v), then their constants' change
// under refinement (tolerance 0.2).
std::vector<EstimateReport> verify_kernel_bounds(const Density& rho, const VelocityGrid& grid,
                                                 const KernelParams& params,
                                                 const std::vector<double>& r_sweep,
                                                 const std::vector<Velocity>& v_sweep, bool refine = true);

struct TestFunction {
  std::string name;
  std::function<double(const Velocity&)> phi;
};

// Smooth test functions for the linear bound (d = 2 or 3).
std::vector<TestFunction> default_test_functions();

// Discrete C^2 seminorm at node i: max over other nodes v' (and one ring of
// zero ghost nodes outside the box) of |phi(v') - phi(v) - (v' - v).grad phi(v)| / |v' - v|^2,
// grad by central differences.
double c2_seminorm(const GridFunction& phi, std::size_t node);

// Linear bound: max over nodes with |v| <= v_max / 2 of
// |Q_s(f, phi)(v)| / (Lambda(v) |phi|_inf^{1-s} [phi]_{C^2(v)}^s).
// One report per phi: measured_constant is the ratio on `grid`, the checked
// quantity its relative change on the refined grid (tolerance 0.2).
std::vector<EstimateReport> verify_linear_bound(const Density& rho, const VelocityGrid& grid,
                                                const std::vector<TestFunction>& phis,
                                                const KernelParams& params, bool refine = true);

// Minimizer of [phi] r^{2-2s} + |phi| r^{-2s} over `r_sweep`, divided by the
// proof's radius (|phi| / [phi])^{1/2}.
double two_term_argmin_ratio(double sup_phi, double seminorm, double s, const std::vector<double>& r_sweep);

// Cancellation lemma: direct sigma-integral of [f(v'_*) - f(v_*)] B vs
// (f * C_S |.|^gamma)(v) at the sample nodes; max relative error, tolerance 1e-2.
EstimateReport verify_cancellation(const Density& rho, const VelocityGrid& grid, const KernelParams& params,
                                   const std::vector<Velocity>& u_sweep);

// Growth of Lambda: slope of log Lambda(v) against log(1 + |v|) over `v_sweep`
// (expected gamma + 2s, tolerance 0.1), then the max ratio's change under
// refinement.
std::vector<EstimateReport> verify_lambda_growth(const Density& rho, const VelocityGrid& grid,
                                                 const KernelParams& params,
                                                 const std::vector<double>& v_norms, bool refine = true);

// Cone volumes at |v0| = sqrt(2) R (1 - xi/2), R = 1: slopes of log |C_R| and
// log |C_R^*| against log xi, expected (d+1)/2 and (d-1)/2, tolerance 0.15.
// Sweep point k uses seed + k. Throws NumericalError when a standard error
// exceeds 5% of its estimate.
std::vector<EstimateReport> verify_volumes(int d, const std::vector<double>& xi_sweep,
                                           std::uint64_t n_samples, std::uint64_t seed);

// Extrapolated sigma-form Q against the Carleman-form q_full on the same
// grid data: weighted L1 relative difference (weight 1 + |v|^2), tolerance 0.05.
EstimateReport verify_sigma_oracle(const Density& rho, const VelocityGrid& grid, const KernelParams& params);

}  // namespace carlab
