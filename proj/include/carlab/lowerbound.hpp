#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carlab/field.hpp"
#include "carlab/params.hpp"

namespace carlab {

// Largest admissible xi: 1 - 2^{-1/2}.
inline constexpr double kXiMax = 0.29289321881345254;

struct BumpSpec {
  double R = 1.0;
  double xi = 0.25;

  void validate() const;
  double inner_radius() const noexcept;  // sqrt(2) (1 - xi) R
  double outer_radius() const noexcept;  // sqrt(2) (1 - xi/2) R
};

// Radial profile: 1 inside inner_radius, 0 beyond outer_radius, quintic
// smoothstep in between.
double bump(const Velocity& v, const BumpSpec& spec);

// sup over the transition shell of the discrete second difference of the bump
// with step h (largest of the radial second difference and phi'(r)/r).
double bump_second_difference_sup(const BumpSpec& spec, double h);

struct BarrierParams {
  double alpha = 0.5;
  double C = 1.0;
  double xi = 0.25;
  double R = 1.0;
  double ell = 0.1;
  double q = 0.0;
  int d = 2;
  double gamma = 0.0;
  double s = 0.5;

  static BarrierParams from(const KernelParams& params, double alpha, double C, double xi, double R,
                            double ell);
  void validate() const;
  double source() const noexcept;  // A = alpha xi^q R^{d+gamma} ell^2
  double rate() const noexcept;    // B = C R^gamma xi^{-2s}
};

// A (1 - e^{-B t}) / B.
double barrier(double t, const BarrierParams& p);

// |l'(t) - (A - B l(t))| / A with l' from a five-point central difference.
double barrier_ode_residual(double t, const BarrierParams& p);

struct SpreadResult {
  double ell = 0.0;
  double R = 0.0;  // radius sqrt(2) (1 - xi) R on which the new bound holds
};

// c_s xi^q R^{d+gamma} ell^2 min(t_window, R^{-gamma} xi^{2s}). Throws
// PreconditionError unless xi^q R^{d+gamma} ell < 1/2.
SpreadResult spread_step(double ell, double R, double xi, double t_window, const KernelParams& params,
                         double c_s = 1.0);

struct SpreadingState {
  int n = 0;
  double xi = 0.0;
  double R = 0.0;
  double T = 0.0;
  double ell = 0.0;      // may underflow to 0; log_ell keeps the value
  double log_ell = 0.0;
};

double xi_schedule(int n);                  // 2^{-(n+2)}
double time_schedule(int n, double T0);     // (1 - 2^{-n}) T0
std::vector<double> radius_schedule(int n_max);  // R_0 .. R_{n_max}

// Analytic recursion for stages 0..n_max. Throws PreconditionError naming the
// stage if the smallness condition fails.
std::vector<SpreadingState> iterate(double T0, double ell0, const KernelParams& params, double c_s,
                                    int n_max);

struct GaussianBound {
  double a = 0.0;
  double b = 0.0;
};

// a = ell_0, b = max_{n>=1} (ln ell_0 - ln ell_n) / R_{n-1}^2 (at least 0),
// nudged upward until a e^{-b R_{n-1}^2} <= ell_n holds in floating point.
GaussianBound fit_gaussian(const std::vector<SpreadingState>& states);

// True when a e^{-b R_{n-1}^2} <= ell_n for all n >= 1 and a <= ell_0
// (compared in logs when ell_n underflows).
bool fit_is_sound(const GaussianBound& bound, const std::vector<SpreadingState>& states);

struct CertificateReport {
  double a = 0.0;
  double b = 0.0;
  double radius = 0.0;  // nodes with |v| <= radius were checked
  std::size_t nodes_checked = 0;
  double worst_margin = 0.0;  // min of f(v) - a e^{-b|v|^2}
  Velocity worst_node;
  bool pass = false;
};

CertificateReport certify(const DistributionField& f, const GaussianBound& bound,
                          double radius = INFINITY);

struct EmpiricalSpreading {
  std::vector<SpreadingState> states;
  std::optional<GaussianBound> bound;
  std::optional<CertificateReport> certificate;
  std::string message;  // why the stage list stopped
};

// Plateaus measured from snapshots: ell_n = min over snapshots with
// t >= T_{n+1} of min_{|v| <= R_n} f. Stages stop when R_n leaves the grid,
// T_{n+1} is past the last snapshot, or a plateau vanishes. The certificate is
// checked on the last snapshot for |v| <= R of the last stage.
EmpiricalSpreading empirical_spreading(const std::vector<std::pair<double, DistributionField>>& snapshots,
                                       double T0, int n_max = 64);

}  // namespace carlab
