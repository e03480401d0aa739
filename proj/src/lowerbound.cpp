#include "carlab/lowerbound.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "carlab/errors.hpp"
#include "carlab/solver.hpp"

namespace carlab {

void BumpSpec::validate() const {
  if (!(R >= 1.0) || !std::isfinite(R)) throw InputError("bump radius must be at least 1");
  if (!(xi > 0.0 && xi < kXiMax)) throw InputError("xi must lie in (0, 1 - 2^{-1/2})");
}

double BumpSpec::inner_radius() const noexcept { return M_SQRT2 * (1.0 - xi) * R; }
double BumpSpec::outer_radius() const noexcept { return M_SQRT2 * (1.0 - 0.5 * xi) * R; }

namespace {

double smoothstep5(double t) { return t * t * t * (t * (6.0 * t - 15.0) + 10.0); }
double smoothstep5_prime(double t) { return 30.0 * t * t * (t - 1.0) * (t - 1.0); }

double bump_profile(double r, double r1, double r2) {
  if (r <= r1) return 1.0;
  if (r >= r2) return 0.0;
  return 1.0 - smoothstep5((r - r1) / (r2 - r1));
}

}  // namespace

double bump(const Velocity& v, const BumpSpec& spec) {
  spec.validate();
  return bump_profile(v.norm(), spec.inner_radius(), spec.outer_radius());
}

double bump_second_difference_sup(const BumpSpec& spec, double h) {
  spec.validate();
  if (!(h > 0.0)) throw InputError("step must be positive");
  const double r1 = spec.inner_radius(), r2 = spec.outer_radius();
  const int samples = 4000;
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double r = (r1 - h) + (r2 - r1 + 2.0 * h) * i / samples;
    if (r <= 0.0) continue;
    const double dd = (bump_profile(r + h, r1, r2) + bump_profile(std::max(r - h, 0.0), r1, r2) -
                       2.0 * bump_profile(r, r1, r2)) /
                      (h * h);
    double tangential = 0.0;
    if (r > r1 && r < r2) tangential = smoothstep5_prime((r - r1) / (r2 - r1)) / ((r2 - r1) * r);
    worst = std::max({worst, std::abs(dd), tangential});
  }
  return worst;
}

BarrierParams BarrierParams::from(const KernelParams& params, double alpha, double C, double xi, double R,
                                  double ell) {
  BarrierParams p;
  p.alpha = alpha;
  p.C = C;
  p.xi = xi;
  p.R = R;
  p.ell = ell;
  p.d = params.d;
  p.gamma = params.gamma;
  p.s = params.s;
  p.q = params.spreading_q();
  return p;
}

void BarrierParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("barrier alpha must lie in (0, 1)");
  if (!(C > 0.0) || !(xi > 0.0) || !(R > 0.0) || !(ell > 0.0))
    throw InputError("barrier C, xi, R, ell must be positive");
  const double expected = d + 2.0 * (gamma + 2.0 * s + 1.0);
  if (std::abs(q - expected) > 1e-12 * expected) throw InputError("barrier q must equal d + 2(gamma + 2s + 1)");
}

double BarrierParams::source() const noexcept {
  return alpha * std::pow(xi, q) * std::pow(R, d + gamma) * ell * ell;
}

double BarrierParams::rate() const noexcept { return C * std::pow(R, gamma) * std::pow(xi, -2.0 * s); }

namespace {

double barrier_closed_form(double t, double A, double B) { return -A * std::expm1(-B * t) / B; }

}  // namespace

double barrier(double t, const BarrierParams& p) {
  p.validate();
  if (!(t >= 0.0)) throw InputError("barrier time must be nonnegative");
  return barrier_closed_form(t, p.source(), p.rate());
}

double barrier_ode_residual(double t, const BarrierParams& p) {
  p.validate();
  if (!(t >= 0.0)) throw InputError("barrier time must be nonnegative");
  const double A = p.source(), B = p.rate();
  // Bh = 1e-3 balances the O((Bh)^4) truncation against roundoff.
  const double h = 1e-3 / B;
  auto l = [&](double x) { return barrier_closed_form(x, A, B); };
  const double deriv = (-l(t + 2 * h) + 8.0 * l(t + h) - 8.0 * l(t - h) + l(t - 2 * h)) / (12.0 * h);
  return std::abs(deriv - (A - B * l(t))) / A;
}

SpreadResult spread_step(double ell, double R, double xi, double t_window, const KernelParams& params,
                         double c_s) {
  params.validate();
  BumpSpec{R, xi}.validate();
  if (!(ell >= 0.0) || !std::isfinite(ell)) throw InputError("plateau value must be nonnegative");
  if (!(t_window > 0.0)) throw InputError("time window must be positive");
  if (!(c_s > 0.0)) throw InputError("c_s must be positive");
  const double q = params.spreading_q();
  const double scale = std::pow(xi, q) * std::pow(R, params.d + params.gamma);
  if (!(scale * ell < 0.5)) {
    std::ostringstream os;
    os << "smallness condition fails: xi^q R^(d+gamma) ell = " << scale * ell << " >= 1/2";
    throw PreconditionError(os.str());
  }
  const double window = std::min(t_window, std::pow(R, -params.gamma) * std::pow(xi, 2.0 * params.s));
  return {c_s * scale * ell * ell * window, M_SQRT2 * (1.0 - xi) * R};
}

double xi_schedule(int n) { return std::ldexp(1.0, -(n + 2)); }

double time_schedule(int n, double T0) { return (1.0 - std::ldexp(1.0, -n)) * T0; }

std::vector<double> radius_schedule(int n_max) {
  std::vector<double> R{1.0};
  for (int n = 0; n < n_max; ++n) R.push_back(M_SQRT2 * (1.0 - xi_schedule(n)) * R.back());
  return R;
}

std::vector<SpreadingState> iterate(double T0, double ell0, const KernelParams& params, double c_s,
                                    int n_max) {
  params.validate();
  if (!(T0 > 0.0 && T0 <= 1.0)) throw InputError("T0 must lie in (0, 1]");
  if (!(ell0 > 0.0 && ell0 < 1.0)) throw InputError("ell0 must lie in (0, 1)");
  if (!(c_s > 0.0)) throw InputError("c_s must be positive");
  if (n_max < 0) throw InputError("n_max must be nonnegative");
  const double q = params.spreading_q();
  const double dg = params.d + params.gamma;
  const std::vector<double> R = radius_schedule(n_max);
  std::vector<SpreadingState> out;
  double log_ell = std::log(ell0);
  for (int n = 0; n <= n_max; ++n) {
    SpreadingState st;
    st.n = n;
    st.xi = xi_schedule(n);
    st.R = R[n];
    st.T = time_schedule(n, T0);
    st.log_ell = log_ell;
    st.ell = n == 0 ? ell0 : std::exp(log_ell);
    out.push_back(st);
    if (n == n_max) break;
    const double log_scale = q * std::log(st.xi) + dg * std::log(st.R);
    if (!(log_scale + log_ell < std::log(0.5))) {
      std::ostringstream os;
      os << "smallness condition fails at stage " << n << ": log(xi^q R^(d+gamma) ell) = "
         << log_scale + log_ell;
      throw PreconditionError(os.str());
    }
    const double window = std::ldexp(T0, -(n + 1));
    const double cap = -params.gamma * std::log(st.R) + 2.0 * params.s * std::log(st.xi);
    log_ell = std::log(c_s) + log_scale + 2.0 * log_ell + std::min(std::log(window), cap);
  }
  return out;
}

bool fit_is_sound(const GaussianBound& bound, const std::vector<SpreadingState>& states) {
  if (states.empty()) return false;
  if (!(bound.a <= states.front().ell)) return false;
  for (std::size_t n = 1; n < states.size(); ++n) {
    const double r2 = states[n - 1].R * states[n - 1].R;
    if (states[n].ell >= DBL_MIN) {
      if (!(bound.a * std::exp(-bound.b * r2) <= states[n].ell)) return false;
    } else if (!(std::log(bound.a) - bound.b * r2 <= states[n].log_ell)) {
      return false;
    }
  }
  return true;
}

GaussianBound fit_gaussian(const std::vector<SpreadingState>& states) {
  if (states.empty()) throw InputError("fit_gaussian needs at least one state");
  for (const auto& s : states)
    if (!(s.ell > 0.0) && !std::isfinite(s.log_ell)) throw InputError("plateau values must be positive");
  GaussianBound g;
  g.a = states.front().ell;
  const double log_a = states.front().log_ell;
  for (std::size_t n = 1; n < states.size(); ++n) {
    const double r2 = states[n - 1].R * states[n - 1].R;
    g.b = std::max(g.b, (log_a - states[n].log_ell) / r2);
  }
  // Rounding in exp/log can leave a constraint violated by an ulp or two.
  for (int k = 0; k < 4096 && !fit_is_sound(g, states); ++k) g.b = std::nextafter(g.b, INFINITY);
  if (!fit_is_sound(g, states)) throw NumericalError("Gaussian fit could not be made sound");
  return g;
}

CertificateReport certify(const DistributionField& f, const GaussianBound& bound, double radius) {
  const VelocityGrid& grid = f.grid();
  CertificateReport rep;
  rep.a = bound.a;
  rep.b = bound.b;
  rep.radius = radius;
  rep.worst_margin = INFINITY;
  rep.worst_node = Velocity(grid.dim());
  const long N = static_cast<long>(grid.size());
  std::vector<double> margin(grid.size(), INFINITY);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < N; ++i) {
    const Velocity v = grid.node(static_cast<std::size_t>(i));
    const double r2 = v.norm2();
    if (std::sqrt(r2) > radius) continue;
    margin[i] = f[i] - bound.a * std::exp(-bound.b * r2);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (margin[i] == INFINITY) continue;
    ++rep.nodes_checked;
    if (margin[i] < rep.worst_margin) {
      rep.worst_margin = margin[i];
      rep.worst_node = grid.node(i);
    }
  }
  rep.pass = rep.nodes_checked > 0 && rep.worst_margin >= 0.0;
  if (rep.nodes_checked == 0) rep.worst_margin = 0.0;
  return rep;
}

EmpiricalSpreading empirical_spreading(const std::vector<std::pair<double, DistributionField>>& snapshots,
                                       double T0, int n_max) {
  if (!(T0 > 0.0)) throw InputError("T0 must be positive");
  EmpiricalSpreading out;
  if (snapshots.empty()) {
    out.message = "no snapshots";
    return out;
  }
  for (std::size_t i = 1; i < snapshots.size(); ++i)
    if (!(snapshots[i].first > snapshots[i - 1].first)) throw InputError("snapshot times must increase");
  const VelocityGrid& grid = snapshots.front().second.grid();
  const double t_last = snapshots.back().first;
  const std::vector<double> R = radius_schedule(n_max);
  out.message = "reached n_max";
  for (int n = 0; n <= n_max; ++n) {
    if (R[n] > grid.v_max()) {
      out.message = "R_" + std::to_string(n) + " exceeds v_max";
      break;
    }
    const double t_need = time_schedule(n + 1, T0);
    if (t_need > t_last * (1.0 + 1e-12)) {
      out.message = "T_" + std::to_string(n + 1) + " is past the last snapshot";
      break;
    }
    double ell = INFINITY;
    for (const auto& [t, f] : snapshots)
      if (t >= t_need * (1.0 - 1e-12)) ell = std::min(ell, measure_plateau(f, R[n]));
    if (!(ell > 0.0)) {
      out.message = "plateau vanishes at stage " + std::to_string(n);
      break;
    }
    SpreadingState st;
    st.n = n;
    st.xi = xi_schedule(n);
    st.R = R[n];
    st.T = time_schedule(n, T0);
    st.ell = ell;
    st.log_ell = std::log(ell);
    out.states.push_back(st);
  }
  if (out.states.empty()) return out;
  out.bound = fit_gaussian(out.states);
  out.certificate = certify(snapshots.back().second, *out.bound, out.states.back().R);
  return out;
}

}  // namespace carlab
