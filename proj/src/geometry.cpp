#include "carlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace carlab {

std::string Velocity::to_string() const {
  std::string out = "(";
  char buf[32];
  for (int i = 0; i < dim_; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", c_[i]);
    out += buf;
    out += i + 1 < dim_ ? "," : ")";
  }
  return out;
}

namespace {

void check_config(const CollisionConfig& cfg) {
  require_same_dim(cfg.v, cfg.v_star);
  require_same_dim(cfg.v, cfg.sigma);
  if (!cfg.v.is_finite() || !cfg.v_star.is_finite() || !cfg.sigma.is_finite())
    throw InputError("collision velocities must be finite");
  if (std::abs(cfg.sigma.norm() - 1.0) > kUnitTolerance)
    throw InputError("sigma must be a unit vector");
}

}  // namespace

PostCollision post_collision(const CollisionConfig& cfg) {
  check_config(cfg);
  const Velocity mid = 0.5 * (cfg.v + cfg.v_star);
  const double half = 0.5 * distance(cfg.v, cfg.v_star);
  return {mid + half * cfg.sigma, mid - half * cfg.sigma};
}

double deviation_angle(const CollisionConfig& cfg) {
  check_config(cfg);
  const Velocity u = cfg.v - cfg.v_star;
  const double r = u.norm();
  if (r == 0.0) throw SingularityError("deviation angle undefined for v = v_*");
  const double c = std::clamp(u.dot(cfg.sigma) / r, -1.0, 1.0);
  return std::acos(c);
}

double half_angle_sine(const CollisionConfig& cfg) {
  const PostCollision post = post_collision(cfg);
  const Velocity dv = post.v_prime - cfg.v;
  const double r = dv.norm();
  if (r == 0.0) return 0.0;
  return std::clamp(dv.dot(cfg.sigma) / r, -1.0, 1.0);
}

Velocity reconstruct_sigma(const PostCollision& post) {
  const Velocity diff = post.v_prime - post.v_prime_star;
  const double r = diff.norm();
  if (r == 0.0) throw SingularityError("sigma undefined when v' = v'_*");
  return (1.0 / r) * diff;
}

double carleman_angle(double dist_v_vprime, double dist_v_vprimestar) noexcept {
  return 2.0 * std::atan2(dist_v_vprime, dist_v_vprimestar);
}

double carleman_weights(const Velocity& v, const Velocity& v_prime, const Velocity& v_prime_star,
                        const KernelParams& params) {
  require_same_dim(v, v_prime);
  require_same_dim(v, v_prime_star);
  if (v.dim() != params.d) throw InputError("velocity dimension does not match kernel params");
  const Velocity w = v_prime - v;
  const double rw = w.norm();
  if (rw == 0.0) throw SingularityError("Carleman weight is singular at v' = v");
  const Velocity x = v_prime_star - v;
  if (std::abs(x.dot(w)) / rw > kHyperplaneTolerance * rw * std::max(1.0, x.norm()))
    throw InputError("v'_* is not on the hyperplane through v orthogonal to v' - v");
  const double rx = x.norm();
  const double theta = carleman_angle(rw, rx);
  const int d = params.d;
  return std::pow(rw, -(d - 1) - 2.0 * params.s) * std::pow(rx, params.carleman_exponent()) *
         params.tilde_b(std::cos(theta)) / rw;
}

}  // namespace carlab
