#include "carlab/sigma_oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "carlab/detail/hyperplane.hpp"
#include "carlab/kernel.hpp"
#include "carlab/quadrature.hpp"

namespace carlab {

std::vector<double> theta_panels(double theta_m, bool refine_to_pi) {
  if (!(theta_m > 0.0) || theta_m >= M_PI_2) throw ConfigError("theta_min must lie in (0, pi/2)");
  std::vector<double> b;
  for (double t = theta_m; t < M_PI_2; t *= 2.0) b.push_back(t);
  b.push_back(M_PI_2);
  if (refine_to_pi) {
    for (double gap = M_PI_4; gap >= 1e-4; gap *= 0.5) b.push_back(M_PI - gap);
  } else {
    b.push_back(0.75 * M_PI);
  }
  b.push_back(M_PI);
  return b;
}

std::vector<double> richardson_weights(double s) {
  const double p = 2.0 - 2.0 * s, q = 4.0 - 2.0 * s;
  const double t[3] = {4.0, 2.0, 1.0};
  // Rows of A are (1, t^p, t^q); the weights solve A^T w = e1.
  double A[3][3];
  for (int i = 0; i < 3; ++i) {
    A[i][0] = 1.0;
    A[i][1] = std::pow(t[i], p);
    A[i][2] = std::pow(t[i], q);
  }
  auto det3 = [](double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  double At[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) At[i][j] = A[j][i];
  const double D = det3(At);
  std::vector<double> w(3);
  for (int k = 0; k < 3; ++k) {
    double M[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M[i][j] = j == k ? (i == 0 ? 1.0 : 0.0) : At[i][j];
    w[k] = det3(M) / D;
  }
  return w;
}

namespace {

struct ThetaRule {
  std::vector<double> lower;  // panel lower bounds
  std::vector<std::vector<double>> theta, weight, b;  // per panel nodes
};

ThetaRule make_theta_rule(double theta_m, bool refine_to_pi, int nodes, const KernelParams& p) {
  const std::vector<double> bounds = theta_panels(theta_m, refine_to_pi);
  const GaussRule& g = gauss_legendre(nodes);
  ThetaRule r;
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    const double a = bounds[k], c = bounds[k + 1];
    r.lower.push_back(a);
    std::vector<double> th, w, bb;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double t = 0.5 * (a + c) + 0.5 * (c - a) * g.x[i];
      th.push_back(t);
      w.push_back(0.5 * (c - a) * g.w[i]);
      bb.push_back(angular_b(t, p));
    }
    r.theta.push_back(std::move(th));
    r.weight.push_back(std::move(w));
    r.b.push_back(std::move(bb));
  }
  return r;
}

// Truncated integral for theta_m = t * theta_min from per-panel sums.
double truncated_from_panels(const ThetaRule& rule, const double* panel, double theta_cut) {
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.lower.size(); ++k)
    if (rule.lower[k] >= theta_cut * (1.0 - 1e-12)) acc += panel[k];
  return acc;
}

double extrapolate(const ThetaRule& rule, const double* panel, double theta_min, double s) {
  const auto w = richardson_weights(s);
  return w[0] * truncated_from_panels(rule, panel, 4.0 * theta_min) +
         w[1] * truncated_from_panels(rule, panel, 2.0 * theta_min) +
         w[2] * truncated_from_panels(rule, panel, theta_min);
}

void perp_basis(const Velocity& u_hat, Velocity& e1, Velocity& e2) {
  detail::complement_basis(u_hat, e1, e2);
}

// Per-panel sums of int [f(v')f(v'_*) - f(v)f(v_*)] |u|^gamma b dsigma for one pair.
template <class Sampler>
void pair_panels(const Velocity& v, const Velocity& v_star, const Sampler& f, double fv,
                 double fvs, const KernelParams& p, const ThetaRule& rule, int azimuth,
                 const Box& gain_box, double* out) {
  const int d = v.dim();
  const Velocity u = v - v_star;
  const double rho = u.norm();
  for (std::size_t k = 0; k < rule.lower.size(); ++k) out[k] = 0.0;
  if (rho == 0.0) return;
  const Velocity mid = 0.5 * (v + v_star);
  // Gain is zero unless the sphere of radius rho/2 around mid meets the support.
  bool gain_possible = !gain_box.empty();
  if (gain_possible) {
    double dist2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double e = std::max({gain_box.lo[a] - mid[a], 0.0, mid[a] - gain_box.hi[a]});
      dist2 += e * e;
    }
    gain_possible = dist2 <= 0.25 * rho * rho;
  }
  const double loss = fv * fvs;
  if (!gain_possible && loss == 0.0) return;
  const double speed = p.gamma == 0.0 ? 1.0 : std::pow(rho, p.gamma);
  const Velocity uh = (1.0 / rho) * u;
  Velocity e1, e2;
  perp_basis(uh, e1, e2);
  const double half = 0.5 * rho;
  for (std::size_t k = 0; k < rule.lower.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.theta[k].size(); ++i) {
      const double th = rule.theta[k][i];
      const double c = std::cos(th), sn = std::sin(th);
      double inner = 0.0;
      if (d == 2) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          const Velocity sigma = c * uh + (sgn * sn) * e1;
          double gain = 0.0;
          if (gain_possible) {
            const double a = f(mid + half * sigma);
            if (a != 0.0) gain = a * f(mid - half * sigma);
          }
          inner += gain - loss;
        }
      } else {
        const double dphi = 2.0 * M_PI / azimuth;
        for (int j = 0; j < azimuth; ++j) {
          const double phi = (j + 0.5) * dphi;
          const Velocity sigma = c * uh + (sn * std::cos(phi)) * e1 + (sn * std::sin(phi)) * e2;
          double gain = 0.0;
          if (gain_possible) {
            const double a = f(mid + half * sigma);
            if (a != 0.0) gain = a * f(mid - half * sigma);
          }
          inner += gain - loss;
        }
        inner *= sn * dphi;
      }
      acc += rule.weight[k][i] * rule.b[k][i] * inner;
    }
    out[k] = acc * speed;
  }
}

double require_theta_min(const KernelParams& params) {
  params.validate();
  if (!params.theta_min || !(*params.theta_min > 0.0))
    throw ConfigError("the sigma oracle needs theta_min > 0");
  if (4.0 * *params.theta_min >= M_PI_2) throw ConfigError("theta_min must be below pi/8");
  return *params.theta_min;
}

}  // namespace

double sigma_pair_integrand(const Velocity& v, const Velocity& v_star, const DistributionField& f,
                            const KernelParams& params, double theta_m,
                            const SigmaOracleOptions& opts) {
  params.validate();
  if (!(theta_m > 0.0)) throw ConfigError("theta_m must be positive");
  require_same_dim(v, v_star);
  const ThetaRule rule = make_theta_rule(theta_m, false, opts.nodes_per_panel, params);
  std::vector<double> panel(rule.lower.size());
  const GridFunction& g = f.function();
  auto cubic = [&g](const Velocity& x) { return g.sample_cubic(x); };
  pair_panels(v, v_star, cubic, g.sample_cubic(v), g.sample_cubic(v_star), params, rule,
              opts.azimuth_nodes, g.support_box(2.0), panel.data());
  double acc = 0.0;
  for (double x : panel) acc += x;
  return acc;
}

namespace {

// Shared body of the oracle: `nodal(j)` gives f at in-grid lattice points
// (flat index), `sample` f anywhere, `supp` a box containing supp f.
template <class Nodal, class Sampler>
SigmaOracleResult sigma_oracle_core(const VelocityGrid& grid, const Nodal& nodal, const Sampler& sample,
                                    const Box& supp, bool zero, const KernelParams& params,
                                    const SigmaOracleOptions& opts) {
  const double theta_min = require_theta_min(params);
  if (grid.dim() != params.d) throw InputError("field dimension does not match kernel params");
  const int d = grid.dim(), n = grid.n();
  const double h = grid.h();
  const ThetaRule rule = make_theta_rule(theta_min, false, opts.nodes_per_panel, params);
  const std::size_t np = rule.lower.size();

  SigmaOracleResult res;
  res.theta_mins = {4.0 * theta_min, 2.0 * theta_min, theta_min};
  res.extrapolated = GridFunction(grid, 0.0);
  res.truncated.assign(3, GridFunction(grid, 0.0));
  if (zero) return res;

  // |v - v_*| never exceeds the support diameter for a nonzero gain, and v_*
  // must lie in the support for a nonzero loss.
  double diam2 = 0.0;
  for (int a = 0; a < d; ++a) diam2 += std::pow(supp.hi[a] - supp.lo[a], 2);
  const int K = static_cast<int>(std::ceil(std::max(std::sqrt(diam2), 2.0 * grid.v_max()) / h));
  const int span = 2 * K + 1;
  long offsets = 1;
  for (int a = 0; a < d; ++a) offsets *= span;
  const auto w = richardson_weights(params.s);
  const long N = static_cast<long>(grid.size());

#pragma omp parallel
  {
    std::vector<double> pair(np), acc(np);
#pragma omp for schedule(dynamic, 4)
    for (long node = 0; node < N; ++node) {
      const auto idx = grid.index(static_cast<std::size_t>(node));
      const Velocity v = grid.node(static_cast<std::size_t>(node));
      const double fv = nodal(static_cast<std::size_t>(node));
      std::fill(acc.begin(), acc.end(), 0.0);
      for (long c = 0; c < offsets; ++c) {
        long rest = c;
        Velocity vs(d);
        std::array<int, 3> j{};
        bool inside = true;
        for (int a = d - 1; a >= 0; --a) {
          const int k = static_cast<int>(rest % span) - K;
          rest /= span;
          j[a] = idx[a] + k;
          vs[a] = v[a] + k * h;
          inside = inside && j[a] >= 0 && j[a] < n;
        }
        const double fvs = inside ? nodal(grid.flat(j)) : 0.0;
        pair_panels(v, vs, sample, fv, fvs, params, rule, opts.azimuth_nodes, supp, pair.data());
        for (std::size_t k = 0; k < np; ++k) acc[k] += pair[k];
      }
      for (int t = 0; t < 3; ++t)
        res.truncated[t][node] =
            truncated_from_panels(rule, acc.data(), res.theta_mins[t]) * grid.cell_volume();
      res.extrapolated[node] = w[0] * res.truncated[0][node] + w[1] * res.truncated[1][node] +
                               w[2] * res.truncated[2][node];
    }
  }
  return res;
}

}  // namespace

SigmaOracleResult q_sigma_oracle(const DistributionField& f, const KernelParams& params,
                                 const SigmaOracleOptions& opts) {
  const GridFunction& g = f.function();
  return sigma_oracle_core(
      f.grid(), [&g](std::size_t i) { return g[i]; },
      [&g](const Velocity& x) { return g.sample_cubic(x); }, g.support_box(2.0), f.is_zero(), params,
      opts);
}

SigmaOracleResult q_sigma_oracle(const Density& rho, const VelocityGrid& grid, const KernelParams& params,
                                 const SigmaOracleOptions& opts) {
  if (rho.dim() != grid.dim()) throw InputError("density and grid dimensions differ");
  // Values outside the truncation box are zero, as for grid data.
  const Box box = grid.box();
  auto sample = [&rho, &box](const Velocity& x) { return box.contains(x) ? rho(x) : 0.0; };
  std::vector<double> nodal(grid.size());
  bool zero = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    nodal[i] = sample(grid.node(i));
    zero = zero && nodal[i] == 0.0;
  }
  const Box supp = rho.support().intersect(box);
  return sigma_oracle_core(
      grid, [&nodal](std::size_t i) { return nodal[i]; }, sample, supp, zero || supp.empty(), params,
      opts);
}

double cancellation_sigma(const Velocity& v, const DistributionField& f, const KernelParams& params,
                          const SigmaOracleOptions& opts) {
  const double theta_min = require_theta_min(params);
  const int d = params.d;
  if (v.dim() != d || f.grid().dim() != d) throw InputError("dimension mismatch");
  if (f.is_zero()) return 0.0;
  const GridFunction& g = f.function();
  const Box supp = g.support_box(2.0);
  // Distances from v to the support box.
  double dmin2 = 0.0, dmax2 = 0.0;
  for (int a = 0; a < d; ++a) {
    const double e = std::max({supp.lo[a] - v[a], 0.0, v[a] - supp.hi[a]});
    dmin2 += e * e;
    const double far = std::max(std::abs(v[a] - supp.lo[a]), std::abs(v[a] - supp.hi[a]));
    dmax2 += far * far;
  }
  const double dmin = std::sqrt(dmin2), dmax = std::sqrt(dmax2);

  // Angular rule for the direction of v - v_*.
  const SphereRule omega = d == 2 ? sphere_rule(2, opts.polar_angles, false)
                                  : sphere_rule(3, std::max(4, opts.polar_angles / 8), false);
  const GaussRule& gr = gauss_legendre(opts.nodes_per_panel);
  const double e = params.gamma + d - 1.0;  // rho^{gamma} times the polar Jacobian

  // int f(v - rho omega) rho^e drho domega over rho in [lo, hi], with the
  // sample point optionally mapped through the collision.
  auto radial_sum = [&](double lo, double hi, auto&& point) {
    double acc = 0.0;
    const double width = (hi - lo) / opts.radial_panels;
    for (std::size_t j = 0; j < omega.dirs.size(); ++j) {
      double inner = 0.0;
      for (int pnl = 0; pnl < opts.radial_panels; ++pnl) {
        const double a = lo + pnl * width;
        for (std::size_t q = 0; q < gr.x.size(); ++q) {
          const double rho = a + 0.5 * width * (gr.x[q] + 1.0);
          const double fx = g.sample_cubic(point(omega.dirs[j], rho));
          if (fx != 0.0) inner += 0.5 * width * gr.w[q] * fx * std::pow(rho, e);
        }
      }
      acc += omega.w[j] * inner;
    }
    return acc;
  };

  const double loss = radial_sum(dmin, dmax, [&](const Velocity& w, double rho) { return v - rho * w; });

  const ThetaRule rule = make_theta_rule(theta_min, true, opts.nodes_per_panel, params);
  std::vector<double> panel(rule.lower.size(), 0.0);
  for (std::size_t k = 0; k < rule.lower.size(); ++k) {
    for (std::size_t i = 0; i < rule.theta[k].size(); ++i) {
      const double th = rule.theta[k][i];
      const double c = std::cos(th), sn = std::sin(th);
      const double ch = std::cos(0.5 * th);
      // |v'_* - v| = rho cos(theta/2), so the gain needs rho in [dmin, dmax] / cos(theta/2).
      double inner = 0.0;
      if (d == 2) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          const double gain = radial_sum(dmin / ch, dmax / ch, [&](const Velocity& w, double rho) {
            const Velocity sigma{c * w[0] - sgn * sn * w[1], sgn * sn * w[0] + c * w[1]};
            const Velocity vs = v - rho * w;
            return 0.5 * (v + vs) - (0.5 * rho) * sigma;
          });
          inner += gain - loss;
        }
      } else {
        const double dphi = 2.0 * M_PI / opts.azimuth_nodes;
        for (int j = 0; j < opts.azimuth_nodes; ++j) {
          const double phi = (j + 0.5) * dphi;
          const double gain = radial_sum(dmin / ch, dmax / ch, [&](const Velocity& w, double rho) {
            Velocity e1, e2;
            perp_basis(w, e1, e2);
            const Velocity sigma = c * w + (sn * std::cos(phi)) * e1 + (sn * std::sin(phi)) * e2;
            const Velocity vs = v - rho * w;
            return 0.5 * (v + vs) - (0.5 * rho) * sigma;
          });
          inner += (gain - loss) * sn * dphi;
        }
      }
      panel[k] += rule.weight[k][i] * rule.b[k][i] * inner;
    }
  }
  return extrapolate(rule, panel.data(), theta_min, params.s);
}

}  // namespace carlab
