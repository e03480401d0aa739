#include "carlab/kernel.hpp"

#include <cmath>

#include "carlab/detail/hyperplane.hpp"
#include "carlab/quadrature.hpp"

namespace carlab {

double angular_b(double theta, const KernelParams& params) {
  if (!(theta > 0.0)) throw SingularityError("angular_b is singular at theta = 0");
  if (theta > M_PI) throw InputError("theta must lie in (0, pi]");
  const int d = params.d;
  const double sh = std::sin(0.5 * theta), ch = std::cos(0.5 * theta);
  const double alpha = params.carleman_exponent();
  if (ch <= 0.0) return alpha > 0.0 ? 0.0 : INFINITY;
  return std::pow(2.0, 1 - d) * std::pow(sh, -(d - 1) - 2.0 * params.s) * std::pow(ch, alpha) *
         params.tilde_b(std::cos(theta));
}

double sphere_area_dm2(int d) {
  if (d == 2) return 2.0;
  if (d == 3) return 2.0 * M_PI;
  throw InputError("unsupported dimension");
}

double sphere_area_dm1(int d) {
  if (d == 2) return 2.0 * M_PI;
  if (d == 3) return 4.0 * M_PI;
  throw InputError("unsupported dimension");
}

namespace {

// sin^{d-2} theta [cos(theta/2)^{-d-gamma} - 1] b(cos theta), written in
// phi = theta/2 with the bracket evaluated without cancellation. eps = pi - theta
// is passed separately so that theta near pi keeps its precision.
double cancellation_integrand(double theta, double eps, const KernelParams& p) {
  const int d = p.d;
  const double phi = 0.5 * theta;
  const bool upper = eps < M_PI_2;
  const double sp = upper ? std::cos(0.5 * eps) : std::sin(phi);
  const double cp = upper ? std::sin(0.5 * eps) : std::cos(phi);
  if (cp <= 0.0 || sp <= 0.0) return 0.0;
  double log_cos;
  if (upper) {
    log_cos = std::log(cp);
  } else {
    const double half = std::sin(0.5 * phi);
    log_cos = std::log1p(-2.0 * half * half);
  }
  const double bracket = std::expm1(-(d + p.gamma) * log_cos);
  const double sin_theta = 2.0 * sp * cp;
  const double cos_theta = upper ? -std::cos(eps) : std::cos(theta);
  const double b = std::pow(2.0, 1 - d) * std::pow(sp, -(d - 1) - 2.0 * p.s) *
                   std::exp(p.carleman_exponent() * log_cos) * p.tilde_b(cos_theta);
  return std::pow(sin_theta, d - 2) * bracket * b;
}

}  // namespace

CancellationConstant cancellation_constant(const KernelParams& params) {
  params.validate();
  const double s = params.s;
  // theta = (pi/2) x^{1/(1-s)} on (0, pi/2] and pi - theta = (pi/2) y^{1/s} on
  // [pi/2, pi): both endpoint singularities become linear in the new variable.
  const double e0 = 1.0 / (1.0 - s), e1 = 1.0 / s;
  auto near_zero = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double theta = M_PI_2 * std::pow(x, e0);
    const double jac = M_PI_2 * e0 * std::pow(x, e0 - 1.0);
    return cancellation_integrand(theta, M_PI - theta, params) * jac;
  };
  auto near_pi = [&](double y) {
    if (y <= 0.0) return 0.0;
    const double eps = M_PI_2 * std::pow(y, e1);
    const double jac = M_PI_2 * e1 * std::pow(y, e1 - 1.0);
    return cancellation_integrand(M_PI - eps, eps, params) * jac;
  };
  const QuadResult a = adaptive_integral(near_zero, 0.0, 1.0, 1e-12);
  const QuadResult b = adaptive_integral(near_pi, 0.0, 1.0, 1e-12);
  const double area = sphere_area_dm2(params.d);
  CancellationConstant out{area * (a.value + b.value), area * (a.error + b.error)};
  if (!(out.value > 0.0) || !std::isfinite(out.value))
    throw NumericalError("cancellation constant is not positive and finite");
  if (out.quadrature_error_estimate > 1e-8 * out.value)
    throw NumericalError("cancellation constant did not reach 1e-8 relative accuracy");
  return out;
}

CarlemanRadial::CarlemanRadial(const KernelParams& params, double rw)
    : alpha_(params.carleman_exponent()),
      ialpha_(0),
      const_b_(params.tilde_b.is_constant()),
      b0_(params.tilde_b.coefficients().front()),
      rw2_(rw * rw),
      tilde_b_(params.tilde_b) {
  const double r = std::round(alpha_);
  if (r == alpha_ && r >= 1.0 && r <= 3.0) ialpha_ = static_cast<int>(r);
}

namespace {

void check_point(const Velocity& v, const KernelParams& params) {
  if (v.dim() != params.d) throw InputError("velocity dimension does not match kernel params");
  if (!v.is_finite()) throw InputError("velocity must be finite");
}

template <class Sampler>
double hyperplane_impl(const Velocity& v, const Velocity& w, const Sampler& f, const Box& box,
                       const KernelParams& params) {
  check_point(v, params);
  check_point(w, params);
  const double rw = w.norm();
  if (rw == 0.0) throw SingularityError("hyperplane direction undefined for v' = v");
  return detail::hyperplane_sum(v, (1.0 / rw) * w, box, params.hyperplane_nodes, f,
                                CarlemanRadial(params, rw));
}

}  // namespace

double hyperplane_integral(const Velocity& v, const Velocity& w, const DistributionField& f,
                           const KernelParams& params) {
  if (f.grid().dim() != params.d) throw InputError("field dimension does not match kernel params");
  if (f.is_zero()) {
    if (w.norm() == 0.0) throw SingularityError("hyperplane direction undefined for v' = v");
    return 0.0;
  }
  return hyperplane_impl(v, w, detail::LinearSampler(f.function()), f.support(), params);
}

namespace {

// Bisection on 5-point Gauss-Lobatto panels, accepting a panel when it
// matches the sum of its halves to a fixed absolute tolerance. Lobatto nodes
// include the endpoints, so a jump hiding in a sliver at a panel end is seen;
// the tolerance does not shrink with the panel, so jumps get pinned down.
template <class F>
double lobatto5(const F& f, double a, double b) {
  static const double x1 = std::sqrt(3.0 / 7.0);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double acc = (f(a) + f(b)) / 10.0 + 49.0 / 90.0 * (f(c - h * x1) + f(c + h * x1)) + 32.0 / 45.0 * f(c);
  return acc * h;
}

template <class F>
double bisect(const F& f, double a, double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double l = lobatto5(f, a, m), r = lobatto5(f, m, b);
  if (depth == 0 || std::abs(l + r - whole) <= tol) return l + r;
  return bisect(f, a, m, l, tol, depth - 1) + bisect(f, m, b, r, tol, depth - 1);
}

template <class F>
double piecewise_integral(const F& f, double a, double b) {
  constexpr int kPanels = 16;
  const double w = (b - a) / kPanels;
  double panel[kPanels], scale = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    panel[k] = lobatto5(f, a + k * w, a + (k + 1) * w);
    scale += std::abs(panel[k]);
  }
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (int k = 0; k < kPanels; ++k) acc += bisect(f, a + k * w, a + (k + 1) * w, panel[k], 1e-13 * scale, 48);
  return acc;
}

}  // namespace

double hyperplane_integral(const Velocity& v, const Velocity& w, const Density& f,
                           const KernelParams& params) {
  if (f.dim() != params.d) throw InputError("density dimension does not match kernel params");
  check_point(v, params);
  check_point(w, params);
  const double rw = w.norm();
  if (rw == 0.0) throw SingularityError("hyperplane direction undefined for v' = v");
  // Analytic data may jump (indicators): adaptive oracle, not the fixed-node
  // sum used on grids.
  const Box box = f.support();
  if (box.empty()) return 0.0;
  const CarlemanRadial radial(params, rw);
  const Velocity n = detail::canonical_direction((1.0 / rw) * w);
  Velocity e1, e2;
  detail::complement_basis(n, e1, e2);
  if (params.d == 2) {
    double t0, t1;
    if (!detail::clip_line(v, e1, box, t0, t1)) return 0.0;
    auto line = [&](double t) { return f(v + t * e1) * radial(std::abs(t)); };
    return piecewise_integral(line, t0, t1);
  }
  // polar in the plane: trapezoid in angle (periodic), adaptive along rays
  constexpr int kAngles = 256;
  double acc = 0.0;
  for (int k = 0; k < kAngles; ++k) {
    const double phi = 2.0 * M_PI * k / kAngles;
    const Velocity dir = std::cos(phi) * e1 + std::sin(phi) * e2;
    double t0, t1;
    if (!detail::clip_line(v, dir, box, t0, t1) || t1 <= 0.0) continue;
    auto ray = [&](double r) { return f(v + r * dir) * radial(r) * r; };
    acc += piecewise_integral(ray, std::max(t0, 0.0), t1);
  }
  return acc * 2.0 * M_PI / kAngles;
}

namespace {

template <class F>
double kernel_impl(const Velocity& v, const Velocity& v_prime, const F& f,
                   const KernelParams& params) {
  require_same_dim(v, v_prime);
  const Velocity w = v_prime - v;
  const double rw = w.norm();
  if (rw == 0.0) throw SingularityError("Carleman kernel is singular at v' = v");
  const double H = hyperplane_integral(v, w, f, params);
  return H * std::pow(rw, -params.d - 2.0 * params.s);
}

}  // namespace

double carleman_kernel(const Velocity& v, const Velocity& v_prime, const DistributionField& f,
                       const KernelParams& params) {
  return kernel_impl(v, v_prime, f, params);
}

double carleman_kernel(const Velocity& v, const Velocity& v_prime, const Density& f,
                       const KernelParams& params) {
  return kernel_impl(v, v_prime, f, params);
}

double lambda_weight(const Velocity& v, const DistributionField& f, const KernelParams& params) {
  check_point(v, params);
  const VelocityGrid& grid = f.grid();
  if (grid.dim() != params.d) throw InputError("field dimension does not match kernel params");
  const double e = params.gamma + 2.0 * params.s;
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double fi = f[i];
    if (fi == 0.0) continue;
    const double r = distance(v, grid.node(i));
    acc += fi * (e == 1.0 ? r : std::pow(r, e));
  }
  return acc * grid.cell_volume();
}

}  // namespace carlab
