#include "carlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carlab/errors.hpp"

namespace carlab {

HydroDiagnostics hydro_diagnostics(const DistributionField& f) {
  const VelocityGrid& g = f.grid();
  HydroDiagnostics out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f[i];
    if (x == 0.0) continue;
    out.mass += x;
    out.energy += x * g.node(i).norm2();
    out.entropy += x * std::log(x);
  }
  const double c = g.cell_volume();
  out.mass *= c;
  out.energy *= c;
  out.entropy *= c;
  return out;
}

void HydroBounds::validate() const {
  if (!(m0 > 0.0) || !(M0 >= m0)) throw ConfigError("hydro bounds need 0 < m0 <= M0");
  if (!(E0 > 0.0) || !(H0 > 0.0)) throw ConfigError("hydro bounds need E0, H0 > 0");
}

HydroReport check_hydro_bounds(const DistributionField& f, const HydroBounds& b) {
  b.validate();
  HydroReport r;
  r.measured = hydro_diagnostics(f);
  r.mass_lower = r.measured.mass >= b.m0;
  r.mass_upper = r.measured.mass <= b.M0;
  r.energy = r.measured.energy <= b.E0;
  r.entropy = r.measured.entropy <= b.H0;
  return r;
}

double measure_plateau(const DistributionField& f, double R) {
  const VelocityGrid& g = f.grid();
  if (!(R >= 0.0) || R > g.v_max()) throw InputError("plateau radius must lie in [0, v_max]");
  double m = INFINITY;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (g.node(i).norm() <= R) m = std::min(m, f[i]);
  return m;
}

namespace {

constexpr double kNegativeTolerance = 1e-12;
constexpr int kMaxHalvings = 10;

// Index of the most negative value below -tol, or -1.
long worst_negative(const std::vector<double>& x, double tol) {
  long worst = -1;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < -tol && (worst < 0 || x[i] < x[worst])) worst = static_cast<long>(i);
  return worst;
}

// Clamps values in [-tol, 0) and returns the removed mass (cell volume applied).
double clamp_small(std::vector<double>& x, double cell) {
  double removed = 0.0;
  for (double& v : x)
    if (v < 0.0) {
      removed -= v;
      v = 0.0;
    }
  return removed * cell;
}

}  // namespace

StepResult step(const DistributionField& f, double dt, const Rhs& rhs) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive");
  const VelocityGrid& g = f.grid();
  StepResult out;
  if (f.is_zero()) {
    out.f = f;
    out.dt = dt;
    return out;
  }
  const double tol = kNegativeTolerance * f.sup();
  const GridFunction q0 = rhs(f);
  require_same_grid(q0.grid(), g);
  std::string last;
  for (int halving = 0; halving <= kMaxHalvings; ++halving, dt *= 0.5) {
    std::vector<double> half(f.values());
    for (std::size_t i = 0; i < half.size(); ++i) half[i] += 0.5 * dt * q0[i];
    long bad = worst_negative(half, tol);
    if (bad >= 0) {
      std::ostringstream os;
      os << "half stage: dt=" << dt << " node=" << g.node(bad).to_string() << " value=" << half[bad];
      last = os.str();
      continue;
    }
    clamp_small(half, g.cell_volume());
    const DistributionField fh(g, std::move(half));
    const GridFunction q1 = rhs(fh);
    std::vector<double> next(f.values());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * q1[i];
    bad = worst_negative(next, tol);
    if (bad >= 0) {
      std::ostringstream os;
      os << "full stage: dt=" << dt << " node=" << g.node(bad).to_string() << " value=" << next[bad];
      last = os.str();
      continue;
    }
    out.clamped_mass = clamp_small(next, g.cell_volume());
    for (double v : next)
      if (!std::isfinite(v)) throw NumericalError("time step produced a non-finite value");
    out.f = DistributionField(g, std::move(next));
    out.dt = dt;
    out.halvings = halving;
    return out;
  }
  std::ostringstream dump;
  dump << "sup f=" << f.sup() << " mass=" << f.mass() << "\nlast rejection: " << last;
  throw StiffnessError("step rejected after " + std::to_string(kMaxHalvings) + " halvings", dump.str());
}

StepResult step(const DistributionField& f, double dt, const CollisionOperator& op) {
  return step(f, dt, Rhs([&op](const DistributionField& x) { return op.q_full(x); }));
}

OperatorOptions stepping_options() {
  OperatorOptions o;
  o.positivity_preserving = true;
  return o;
}

StepResult step(const DistributionField& f, double dt, const KernelParams& params) {
  const CollisionOperator op(f.grid(), params, stepping_options());
  return step(f, dt, op);
}

namespace {

void record(SolveTrace& tr, double t, double dt, double clamped, const DistributionField& f) {
  const HydroDiagnostics h = hydro_diagnostics(f);
  tr.t.push_back(t);
  tr.mass.push_back(h.mass);
  tr.energy.push_back(h.energy);
  tr.entropy.push_back(h.entropy);
  tr.sup_f.push_back(f.sup());
  tr.dt.push_back(dt);
  tr.clamped_mass.push_back(clamped);
  for (std::size_t k = 0; k < tr.plateau_radii.size(); ++k)
    tr.plateau[k].push_back(measure_plateau(f, tr.plateau_radii[k]));
}

}  // namespace

SolveResult solve(const DistributionField& f0, double t_end, const Rhs& rhs, const SolveOptions& opts) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be nonnegative");
  if (!(opts.dt_init > 0.0)) throw ConfigError("dt_init must be positive");
  std::vector<double> stops;
  for (double s : opts.stop_times)
    if (s > 0.0 && s < t_end) stops.push_back(s);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  stops.push_back(t_end);

  SolveResult res;
  SolveTrace& tr = res.trace;
  tr.plateau_radii = opts.plateau_radii;
  tr.plateau.assign(tr.plateau_radii.size(), {});
  res.f = f0;
  double t = 0.0, dt = opts.dt_init;
  record(tr, t, 0.0, 0.0, res.f);
  if (opts.observer) opts.observer(t, res.f);

  std::size_t next_stop = t_end == 0.0 ? stops.size() : 0;
  while (next_stop < stops.size()) {
    const double target = stops[next_stop];
    const double remaining = target - t;
    // Stretch the last step by up to 10% rather than leave a sliver.
    const bool last = remaining <= dt * 1.1;
    const double try_dt = last ? remaining : dt;
    StepResult s = step(res.f, try_dt, rhs);
    res.f = std::move(s.f);
    const bool reached = last && s.halvings == 0;
    t = reached ? target : t + s.dt;
    if (reached) ++next_stop;
    record(tr, t, s.dt, s.clamped_mass, res.f);
    if (opts.observer) opts.observer(t, res.f);
    // Halved steps grow back geometrically.
    dt = s.halvings > 0 ? s.dt : std::min(2.0 * dt, opts.dt_init);
  }

  const double m0 = tr.mass.front(), e0 = tr.energy.front();
  for (std::size_t i = 0; i < tr.rows(); ++i) {
    if (m0 > 0.0) tr.mass_drift = std::max(tr.mass_drift, std::abs(tr.mass[i] - m0) / m0);
    if (e0 > 0.0) tr.energy_drift = std::max(tr.energy_drift, std::abs(tr.energy[i] - e0) / e0);
    if (i > 0) tr.max_entropy_increase = std::max(tr.max_entropy_increase, tr.entropy[i] - tr.entropy[i - 1]);
  }
  tr.drift_flag = tr.mass_drift > opts.drift_tolerance || tr.energy_drift > opts.drift_tolerance;
  tr.entropy_flag = tr.max_entropy_increase > opts.entropy_tolerance;
  return res;
}

SolveResult solve(const DistributionField& f0, double t_end, const CollisionOperator& op,
                  const SolveOptions& opts) {
  require_same_grid(f0.grid(), op.grid());
  return solve(f0, t_end, Rhs([&op](const DistributionField& x) { return op.q_full(x); }), opts);
}

SolveResult solve(const DistributionField& f0, double t_end, const KernelParams& params,
                  const SolveOptions& opts) {
  const CollisionOperator op(f0.grid(), params, stepping_options());
  return solve(f0, t_end, op, opts);
}

}  // namespace carlab
