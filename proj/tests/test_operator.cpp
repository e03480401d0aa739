#include <doctest.h>

#include <cmath>

#include "carlab/collision_operator.hpp"
#include "carlab/errors.hpp"
#include "carlab/kernel.hpp"
#include "carlab/sigma_oracle.hpp"

using namespace carlab;

namespace {

// Smooth ring supported in 2 < |v| < 4, zero near the origin.
GridFunction outer_ring(const VelocityGrid& g) {
  GridFunction out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i).norm();
    out[i] = r > 2.0 ? std::exp(-2.0 * (r - 3.0) * (r - 3.0)) : 0.0;
  }
  return out;
}

double weighted_l1(const GridFunction& q) {
  double acc = 0;
  for (std::size_t i = 0; i < q.size(); ++i) acc += std::abs(q[i]) * (1 + q.grid().node(i).norm2());
  return acc;
}

}  // namespace

TEST_SUITE("operator") {
  TEST_CASE("singular part: constants, bilinearity, far data") {
    KernelParams p;
    const VelocityGrid g(2, 4.0, 32);
    const auto f = rasterize(Indicator(2), g);
    for (PVScheme scheme : {PVScheme::kPolar, PVScheme::kLattice}) {
      OperatorOptions o;
      o.scheme = scheme;
      const CollisionOperator op(g, p, o);
      // constants vanish up to the zero extension beyond the box; at v = 0 the
      // deficit is -c (2/3) int_{outside} |w|^{-3} dw = -c (2/3) 4 sqrt(2) / v_max
      const std::size_t mid = g.flat({16, 16, 0});
      CHECK(op.q_singular(f, GridFunction(g, 2.0))[mid] ==
            doctest::Approx(-2.0 * (2.0 / 3.0) * 4 * std::sqrt(2.0) / g.v_max()).epsilon(0.05));

      const GridFunction ring = outer_ring(g);
      const GridFunction q = op.q_singular(f, ring);
      GridFunction ring3 = ring;
      for (auto& x : ring3.values()) x *= 3.0;
      const GridFunction q2 = op.q_singular(f.scaled(0.5), ring3);
      double worst = 0;
      for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(q2[i] - 1.5 * q[i]));
      CHECK(worst <= 1e-12 * q.sup_abs());

      // g = 0 near v = 0: Q_s(f, g)(0) = sum g(v') K_f(0, v') h^d with the
      // closed-form kernel (2/3)|v'|^{-3}; the rasterized disc edge costs ~3%
      const std::size_t centre = g.flat({16, 16, 0});
      double closed = 0, grid_k = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (i == centre || ring[i] == 0.0) continue;
        const Velocity v = g.node(i);
        closed += ring[i] * (2.0 / 3.0) * std::pow(v.norm(), -3) * g.cell_volume();
        grid_k += ring[i] * carleman_kernel(g.node(centre), v, f, p) * g.cell_volume();
      }
      CHECK(q[centre] == doctest::Approx(closed).epsilon(0.05));
      if (scheme == PVScheme::kLattice) CHECK(q[centre] == doctest::Approx(grid_k).epsilon(1e-6));
    }
  }

  TEST_CASE("non-singular part") {
    const VelocityGrid g(2, 4.0, 32);
    const auto f = rasterize(Indicator(2), g);
    KernelParams p;
    const CollisionOperator op(g, p);
    const GridFunction m = op.q_nonsingular(rasterize(Maxwellian(2), g), f.function());
    const double cs = op.cancellation().value;
    const double mass = rasterize(Maxwellian(2), g).mass();
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(m[i] == doctest::Approx(cs * mass * f[i]).epsilon(1e-12));
    CHECK(op.q_nonsingular(DistributionField::zero(g), f.function()).sup_abs() == 0.0);

    KernelParams p1;
    p1.gamma = 1.0;
    const CollisionOperator op1(g, p1);
    const GridFunction q1 = op1.q_nonsingular(f, f.function());
    const std::size_t centre = g.flat({16, 16, 0});
    CHECK(q1[centre] == doctest::Approx(op1.cancellation().value * 2 * M_PI / 3).epsilon(0.03));
    const auto bumps = rasterize(TwoBumps::standard(2), g);
    const GridFunction qb = op1.q_nonsingular(bumps, bumps.function());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(qb[i] >= 0.0);
  }

  TEST_CASE("full operator: equilibrium and conservation") {
    KernelParams p;
    const VelocityGrid g(2, 6.0, 48);
    const CollisionOperator op(g, p);
    const GridFunction qm = op.q_full(rasterize(Maxwellian(2), g));
    const GridFunction qb = op.q_full(rasterize(TwoBumps::standard(2), g));
    CHECK(qm.sup_abs() / qb.sup_abs() <= 0.05);
    double mass = 0, l1 = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      mass += qb[i];
      l1 += std::abs(qb[i]);
    }
    CHECK(std::abs(mass) <= 0.01 * l1);
    CHECK(op.q_full(DistributionField::zero(g)).sup_abs() == 0.0);
  }

  TEST_CASE("grid mismatch and missing cutoff") {
    KernelParams p;
    const VelocityGrid g(2, 4.0, 16), h(2, 4.0, 20);
    const CollisionOperator op(g, p);
    CHECK_THROWS_AS(op.q_singular(rasterize(Maxwellian(2), g), GridFunction(h)), InputError);
    CHECK_THROWS_AS(q_sigma_oracle(rasterize(Maxwellian(2), g), p), ConfigError);
  }

  TEST_CASE("sigma-form oracle invariants") {
    KernelParams p;
    p.theta_min = 0.05;
    const VelocityGrid g(2, 4.0, 16);
    const auto f = rasterize(TwoBumps::standard(2), g);
    for (const auto& [v, vs] : {std::pair<Velocity, Velocity>{{0.25, 0.5}, {-1.5, 0.25}}, {{1.0, -0.5}, {2.0, 1.0}}})
      CHECK(sigma_pair_integrand(v, vs, f, p, 0.05) ==
            doctest::Approx(sigma_pair_integrand(vs, v, f, p, 0.05)).epsilon(1e-12));

    const VelocityGrid g24(2, 4.0, 24);
    const auto r = q_sigma_oracle(rasterize(TwoBumps::standard(2), g24), p);
    double mass = 0, energy = 0, l1 = 0, l1e = 0;
    for (std::size_t i = 0; i < g24.size(); ++i) {
      const double x = r.extrapolated[i], v2 = g24.node(i).norm2();
      mass += x;
      energy += x * v2;
      l1 += std::abs(x);
      l1e += std::abs(x) * v2;
    }
    CHECK(std::abs(mass) <= 1e-3 * l1);
    CHECK(std::abs(energy) <= 1e-3 * l1e);
    CHECK(weighted_l1(r.extrapolated) > 0.0);
  }
}
