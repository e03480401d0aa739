#pragma once

#include <cmath>

#include "carlab/field.hpp"
#include "carlab/params.hpp"
#include "carlab/vec.hpp"

namespace carlab {

// b(cos theta) = 2^{1-d} sin(theta/2)^{-(d-1)-2s} cos(theta/2)^{gamma+2s+1} b~(cos theta).
double angular_b(double theta, const KernelParams& params);

// |S^{d-2}|: 2 for d = 2 (two points), 2 pi for d = 3.
double sphere_area_dm2(int d);
// |S^{d-1}|.
double sphere_area_dm1(int d);

struct CancellationConstant {
  double value = 0.0;
  double quadrature_error_estimate = 0.0;
};

// C_S = |S^{d-2}| int_0^pi sin^{d-2} theta [cos(theta/2)^{-d-gamma} - 1] b(cos theta) dtheta,
// so that the cancellation convolution kernel is S(u) = C_S |u|^gamma.
CancellationConstant cancellation_constant(const KernelParams& params);

// |x|^{gamma+2s+1} b~(cos theta) for a hyperplane point at distance rx from v
// and |v' - v| = rw. Integer exponents avoid pow.
class CarlemanRadial {
 public:
  CarlemanRadial(const KernelParams& params, double rw);
  double operator()(double rx) const noexcept {
    double p;
    switch (ialpha_) {
      case 1: p = rx; break;
      case 2: p = rx * rx; break;
      case 3: p = rx * rx * rx; break;
      default: p = std::pow(rx, alpha_);
    }
    if (const_b_) return p * b0_;
    const double x2 = rx * rx;
    return p * tilde_b_((x2 - rw2_) / (x2 + rw2_));
  }

 private:
  double alpha_;
  int ialpha_;
  bool const_b_;
  double b0_;
  double rw2_;
  AngularProfile tilde_b_;
};

// H_f(v, w) = int_{x . w = 0} f(v + x) |x|^{gamma+2s+1} b~(cos theta) dx by the
// midpoint rule, restricted to the support box of f. For constant b~ this
// depends only on the direction of w.
double hyperplane_integral(const Velocity& v, const Velocity& w, const DistributionField& f,
                           const KernelParams& params);
// Same integral for analytic data by adaptive bisection along the line
// (3D: along 256 rays in the plane), tolerant of jumps.
double hyperplane_integral(const Velocity& v, const Velocity& w, const Density& f,
                           const KernelParams& params);

// K_f(v, v') = |v' - v|^{-(d+2s)} H_f(v, v' - v). Nonnegative.
double carleman_kernel(const Velocity& v, const Velocity& v_prime, const DistributionField& f,
                       const KernelParams& params);
double carleman_kernel(const Velocity& v, const Velocity& v_prime, const Density& f,
                       const KernelParams& params);

// Lambda(v) = int f(v_*) |v - v_*|^{gamma+2s} dv_* as a grid sum.
double lambda_weight(const Velocity& v, const DistributionField& f, const KernelParams& params);

}  // namespace carlab
