#include <doctest.h>

#include <cmath>

#include "carlab/errors.hpp"
#include "carlab/field.hpp"
#include "carlab/quadrature.hpp"

using namespace carlab;

namespace {

GridFunction sample(const VelocityGrid& g, double (*fn)(const Velocity&)) {
  GridFunction out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = fn(g.node(i));
  return out;
}

std::size_t node_at(const VelocityGrid& g, std::array<int, 3> idx) { return g.flat(idx); }

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre and adaptive rules") {
    for (int n : {1, 4, 9, 32}) {
      const GaussRule& r = gauss_legendre(n);
      double w = 0, mom = 0;
      for (std::size_t k = 0; k < r.x.size(); ++k) {
        w += r.w[k];
        mom += r.w[k] * std::pow(r.x[k], 2 * n - 2);
      }
      CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(mom == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(gauss_legendre(0), InputError);
    CHECK(adaptive_integral([](double x) { return std::sin(x); }, 0, M_PI).value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(adaptive_integral([](double x) { return std::sin(1 / x); }, 1e-9, 1, 1e-14, 4), NumericalError);
  }

  TEST_CASE("sphere rules") {
    for (bool half : {false, true}) {
      SphereRule s2 = sphere_rule(2, 64, half), s3 = sphere_rule(3, 16, half);
      double a2 = 0, a3 = 0, z2 = 0;
      for (double w : s2.w) a2 += w;
      for (std::size_t k = 0; k < s3.w.size(); ++k) {
        a3 += s3.w[k];
        z2 += s3.w[k] * s3.dirs[k][0] * s3.dirs[k][0];
        CHECK(s3.dirs[k].norm() == doctest::Approx(1.0).epsilon(1e-14));
      }
      CHECK(a2 == doctest::Approx(2 * M_PI).epsilon(1e-13));
      CHECK(a3 == doctest::Approx(4 * M_PI).epsilon(1e-13));
      CHECK(z2 == doctest::Approx(4 * M_PI / 3).epsilon(1e-12));
    }
  }

  TEST_CASE("principal-value lattice sum") {
    const VelocityGrid g(2, 4.0, 32);
    const double h = g.h(), r = 5.5 * h;
    auto K = [r](const Velocity& w) { return w.norm() <= r ? 1.0 : 0.0; };
    const std::size_t mid = node_at(g, {16, 15, 0});

    const GridFunction c(g, 3.0);
    CHECK(pv_integral(c, mid, K) == 0.0);
    const GridFunction lin = sample(g, [](const Velocity& v) { return 2.0 * v[0] - 0.5 * v[1] + 1.0; });
    CHECK(std::abs(pv_integral(lin, mid, K)) <= 1e-12);

    // |v|^2: every half-space offset contributes 2|w|^2, i.e. the full-lattice
    // sum of |w|^2 over 1 <= |k| <= r/h
    const GridFunction q = sample(g, [](const Velocity& v) { return v.norm2(); });
    double expected = 0;
    for (int a = -6; a <= 6; ++a)
      for (int b = -6; b <= 6; ++b) {
        const double k2 = a * a + b * b;
        if (k2 >= 1 && std::sqrt(k2) * h <= r) expected += k2 * h * h;
      }
    expected *= h * h;
    CHECK(pv_integral(q, mid, K) == doctest::Approx(expected).epsilon(1e-12));

    // linear in g
    GridFunction q3 = q;
    for (auto& x : q3.values()) x *= -2.5;
    CHECK(pv_integral(q3, mid, K) == doctest::Approx(-2.5 * expected).epsilon(1e-12));

    PVQuadratureSpec bad;
    bad.inner_exclusion_radius = 0.2;
    CHECK_THROWS_AS(pv_integral(q, mid, K, bad), ConfigError);
  }

  TEST_CASE("ball moment and tail integrals: trivial properties") {
    KernelParams p;
    const VelocityGrid g(2, 3.0, 24);
    const auto f = rasterize(Indicator(2), g);
    const Velocity v{0.5, 0.0};
    CHECK(ball_second_moment(v, 0.6, DistributionField::zero(g), p) == 0.0);
    CHECK(tail_mass(v, 0.6, DistributionField::zero(g), p) == 0.0);
    const double b1 = ball_second_moment(v, 0.6, f, p), t1 = tail_mass(v, 0.6, f, p);
    CHECK(b1 > 0.0);
    CHECK(ball_second_moment(v, 0.6, f.scaled(2.0), p) == doctest::Approx(2 * b1).epsilon(1e-13));
    CHECK(tail_mass(v, 0.6, f.scaled(2.0), p) == doctest::Approx(2 * t1).epsilon(1e-13));
    double prev = INFINITY;
    for (double r : {0.25, 0.4, 0.6, 0.9, 1.3}) {
      const double t = tail_mass(v, r, f, p);
      CHECK(t <= prev);
      prev = t;
    }
    CHECK_THROWS_AS(ball_second_moment(v, 0.5 * g.h(), f, p), ResolutionError);
  }

  TEST_CASE("cone volumes") {
    const double xi = 0.1;
    const Velocity v0{std::sqrt(2.0) * (1 - xi / 2), 0.0};
    const ConeVolumes a = cone_volume_mc(1.0, xi, v0, 20000, 5);
    const ConeVolumes b = cone_volume_mc(1.0, xi, v0, 20000, 5);
    CHECK(a.vol_C == b.vol_C);
    CHECK(a.vol_Cstar == b.vol_Cstar);
    CHECK(a.vol_C > 0.0);
    const ConeVolumes small = cone_volume_mc(1.0, 0.01, Velocity{std::sqrt(2.0) * (1 - 0.005), 0.0}, 20000, 5);
    CHECK(small.vol_C < a.vol_C);
    CHECK_THROWS_AS(cone_volume_mc(1.0, xi, Velocity{0.5, 0.0}, 100, 1), InputError);
    CHECK_THROWS_AS(cone_volume_mc(1.0, 0.5, v0, 100, 1), InputError);
  }

  TEST_CASE("least-squares line") {
    const auto fit = linear_fit({0, 1, 2, 3}, {1, 3.5, 6, 8.5});
    CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(linear_fit({1, 1}, {0, 1}), InputError);
  }
}
