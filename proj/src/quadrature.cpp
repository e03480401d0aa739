#include "carlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "carlab/detail/hyperplane.hpp"
#include "carlab/kernel.hpp"

namespace carlab {

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 512) throw InputError("Gauss-Legendre order must lie in [1, 512]");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  // legendre_p_zeros returns the nonnegative roots in increasing order.
  const std::vector<double> z = boost::math::legendre_p_zeros<double>(n);
  for (auto r = z.rbegin(); r != z.rend(); ++r) {
    if (*r == 0.0) continue;
    rule.x.push_back(-*r);
  }
  if (n % 2 == 1) rule.x.push_back(0.0);
  for (double r : z)
    if (r != 0.0) rule.x.push_back(r);
  for (double x : rule.x) {
    const double dp = boost::math::legendre_p_prime(n, x);
    rule.w.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

QuadResult adaptive_integral(const std::function<double(double)>& f, double a, double b,
                             double rel_tol, unsigned max_depth) {
  QuadResult out;
  double l1 = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth,
                                                                             rel_tol, &out.error, &l1);
  if (!std::isfinite(out.value)) throw NumericalError("adaptive quadrature produced a non-finite value");
  // Roundoff floors the attainable error near 1e-15 of the L1 norm.
  if (out.error > std::max(rel_tol * std::abs(out.value), 64 * 2.3e-16 * l1) && out.error > 1e-8 * l1)
    throw NumericalError("adaptive quadrature did not converge");
  return out;
}

SphereRule sphere_rule(int d, int n, bool half) {
  if (n < 1) throw InputError("sphere rule needs at least one node");
  SphereRule rule;
  if (d == 2) {
    const double span = half ? M_PI : 2.0 * M_PI;
    const double start = half ? -M_PI_2 : 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = start + span * (j + 0.5) / n;
      rule.dirs.push_back(Velocity{std::cos(t), std::sin(t)});
      rule.w.push_back(2.0 * M_PI / n);
    }
    return rule;
  }
  if (d != 3) throw InputError("sphere rule supports d = 2 or 3");
  const GaussRule& g = gauss_legendre(n);
  const int m = 2 * n;
  for (int i = 0; i < n; ++i) {
    // Polar axis along e1 so the hemisphere is {x > 0}.
    const double c = half ? 0.5 * (g.x[i] + 1.0) : g.x[i];
    // On the hemisphere the interval halves and the weight doubles.
    const double wc = g.w[i];
    const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int k = 0; k < m; ++k) {
      const double phi = 2.0 * M_PI * (k + 0.5) / m;
      rule.dirs.push_back(Velocity{c, sn * std::cos(phi), sn * std::sin(phi)});
      rule.w.push_back(wc * 2.0 * M_PI / m);
    }
  }
  return rule;
}

void PVQuadratureSpec::validate() const {
  if (!(inner_exclusion_radius >= 0.5) || !std::isfinite(inner_exclusion_radius))
    throw ConfigError("inner_exclusion_radius must be at least 0.5 grid cells");
  if (!symmetrization) throw ConfigError("the principal-value sum is always symmetrized");
}

namespace {

enum class Region { kBall, kTail };

double polar_moment(const Velocity& v, double r, const DistributionField& f,
                    const KernelParams& params, int angular_nodes, int radial_nodes, Region region) {
  params.validate();
  if (v.dim() != params.d || f.grid().dim() != params.d)
    throw InputError("dimension mismatch between velocity, field and params");
  if (!(r >= f.grid().h())) throw ResolutionError("radius is below one grid cell");
  if (f.is_zero()) return 0.0;
  const double s = params.s;
  const double radial_const = region == Region::kBall ? std::pow(r, 2.0 - 2.0 * s) / (2.0 - 2.0 * s)
                                                      : std::pow(r, -2.0 * s) / (2.0 * s);
  const SphereRule sph = sphere_rule(params.d, angular_nodes, true);
  const GaussRule& g = gauss_legendre(radial_nodes);
  const detail::LinearSampler sampler(f.function());
  double acc = 0.0;
  for (std::size_t j = 0; j < sph.dirs.size(); ++j) {
    const Velocity& dir = sph.dirs[j];
    double radial;
    if (params.tilde_b.is_constant()) {
      radial = detail::hyperplane_sum(v, dir, f.support(), params.hyperplane_nodes, sampler,
                                      CarlemanRadial(params, 1.0));
    } else {
      // u = (rho/r)^{2-2s} inside, u = (r/rho)^{2s} outside: the radial
      // weight becomes du.
      radial = 0.0;
      for (std::size_t q = 0; q < g.x.size(); ++q) {
        const double u = 0.5 * (g.x[q] + 1.0);
        const double rho = region == Region::kBall ? r * std::pow(u, 1.0 / (2.0 - 2.0 * s))
                                                   : r * std::pow(u, -1.0 / (2.0 * s));
        radial += 0.5 * g.w[q] *
                  detail::hyperplane_sum(v, dir, f.support(), params.hyperplane_nodes, sampler,
                                         CarlemanRadial(params, rho));
      }
    }
    acc += sph.w[j] * radial;
  }
  return acc * radial_const;
}

}  // namespace

double ball_second_moment(const Velocity& v, double r, const DistributionField& f,
                          const KernelParams& params, int angular_nodes, int radial_nodes) {
  return polar_moment(v, r, f, params, angular_nodes, radial_nodes, Region::kBall);
}

double tail_mass(const Velocity& v, double r, const DistributionField& f, const KernelParams& params,
                 int angular_nodes, int radial_nodes) {
  return polar_moment(v, r, f, params, angular_nodes, radial_nodes, Region::kTail);
}

ConeVolumes cone_volume_mc(double R, double xi, const Velocity& v0, std::uint64_t n_samples,
                           std::uint64_t seed) {
  const int d = v0.dim();
  if (!(R > 0.0) || !std::isfinite(R)) throw InputError("cone radius must be positive");
  if (!(xi > 0.0 && xi < 1.0 - std::sqrt(0.5))) throw InputError("xi must lie in (0, 1 - 2^{-1/2})");
  const double r0 = v0.norm();
  const double outer = std::sqrt(2.0) * R * (1.0 - 0.5 * xi);
  const double slack = 1e-12 * R;
  if (r0 < R - slack || r0 > outer + slack)
    throw InputError("v0 must satisfy R <= |v0| <= sqrt(2) R (1 - xi/2)");
  if (n_samples == 0) throw InputError("n_samples must be positive");

  const double thresh2 = std::pow(R * (1.0 - 0.5 * xi), 2);
  const double slice_ball = d == 2 ? 2.0 : M_PI;  // volume of the unit (d-1)-ball
  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  double sum = 0.0, sum2 = 0.0;
  Velocity vp(d);
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    for (int k = 0; k < d; ++k) vp[k] = R * (2.0 * uniform01(rng()) - 1.0);
    if (vp.norm2() > R * R) continue;
    const Velocity u_raw = vp - v0;
    const double len = u_raw.norm();
    if (len == 0.0) continue;
    const double proj = v0.dot(u_raw) / len;
    if (v0.norm2() - proj * proj <= thresh2) continue;
    ++hits;
    const double rad2 = R * R - proj * proj;
    const double slice = rad2 > 0.0 ? slice_ball * std::pow(rad2, 0.5 * (d - 1)) : 0.0;
    sum += slice;
    sum2 += slice * slice;
  }
  const double cube = std::pow(2.0 * R, d);
  const double p = double(hits) / n_samples;
  ConeVolumes out;
  out.accepted = hits;
  out.vol_C = cube * p;
  out.se_C = cube * std::sqrt(p * (1.0 - p) / n_samples);
  if (hits > 0) {
    const double mean = sum / hits;
    out.vol_Cstar = mean;
    const double var = std::max(0.0, sum2 / hits - mean * mean);
    out.se_Cstar = std::sqrt(var / hits);
  }
  return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("linear fit needs >= 2 paired points");
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InputError("linear fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace carlab
