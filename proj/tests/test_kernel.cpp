#include <doctest.h>

#include <cmath>

#include "carlab/errors.hpp"
#include "carlab/field.hpp"
#include "carlab/kernel.hpp"
#include "carlab/quadrature.hpp"

using namespace carlab;

TEST_SUITE("kernel") {
  TEST_CASE("angular profile") {
    KernelParams p;
    CHECK(angular_b(M_PI / 2, p) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(angular_b(M_PI, p) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(angular_b(0.0, p), SingularityError);

    for (int d : {2, 3})
      for (double s : {0.25, 0.5, 0.75}) {
        p.d = d;
        p.s = s;
        const double expected = (d - 1) + 2 * s;
        const double th = 1e-3;
        CHECK(std::log(angular_b(th / 2, p) / angular_b(th, p)) / std::log(2.0) ==
              doctest::Approx(expected).epsilon(0.01));
        std::vector<double> x, y;
        for (int k = 0; k <= 6; ++k) {
          const double t = 1e-5 * std::pow(1e3, k / 6.0);
          x.push_back(std::log(t));
          y.push_back(std::log(angular_b(t, p)));
        }
        CHECK(-linear_fit(x, y).slope == doctest::Approx(expected).epsilon(1e-3 / expected));
      }
  }

  TEST_CASE("cancellation constant against the closed form at d = 2, gamma = 0") {
    KernelParams p;
    for (double s : {0.25, 0.5, 0.75}) {
      p.s = s;
      const auto c = cancellation_constant(p);
      CHECK(c.value == doctest::Approx(M_PI / std::cos(M_PI * (1 - 2 * s) / 2)).epsilon(1e-10));
      CHECK(c.quadrature_error_estimate <= 1e-8 * c.value);
    }
    p.s = 0.5;
    p.d = 3;
    p.gamma = -1.0;
    CHECK(cancellation_constant(p).value > 0.0);
  }

  TEST_CASE("Carleman kernel of the unit-disc indicator") {
    KernelParams p;
    for (double R : {1.0, 2.0}) {
      Indicator ind(2, R);
      for (double r : {0.5, 1.0, 3.0}) {
        const Velocity vp{r * 0.28, r * 0.96};
        CHECK(carleman_kernel({0, 0}, vp, ind, p) ==
              doctest::Approx(2.0 * R * R * R / 3.0 / (r * r * r)).epsilon(1e-6));
      }
    }
    CHECK(carleman_kernel({0, 0}, {1, 0}, Indicator(2, 1.0, 0.0), p) == 0.0);
    // d = 3: int over the unit disc of |x|^2 = pi / 2
    KernelParams p3;
    p3.d = 3;
    CHECK(carleman_kernel({0, 0, 0}, {0.6, 0.0, 0.8}, Indicator(3), p3) == doctest::Approx(M_PI / 2).epsilon(1e-6));
    CHECK_THROWS_AS(carleman_kernel({0.5, 0}, {0.5, 0}, Indicator(2), p), SingularityError);
  }

  TEST_CASE("Carleman kernel on grid data") {
    KernelParams p;
    const VelocityGrid g(2, 4.0, 32);
    const auto M = rasterize(Maxwellian(2), g);
    const Velocity w{0.75, 0.5};
    const double kp = carleman_kernel({0, 0}, w, M, p);
    CHECK(kp > 0.0);
    CHECK(kp == carleman_kernel({0, 0}, -w, M, p));
    CHECK(carleman_kernel({0, 0}, w, DistributionField::zero(g), p) == 0.0);
    CHECK_THROWS_AS(carleman_kernel(w, w, M, p), SingularityError);
    // K(0, v') for the Maxwellian: |v'|^{-3} * int u^2 M(u e) du = |v'|^{-3} / sqrt(2 pi)
    CHECK(carleman_kernel({0, 0}, {1, 0}, Maxwellian(2), p) == doctest::Approx(1 / std::sqrt(2 * M_PI)).epsilon(1e-8));
    CHECK(kp == doctest::Approx(carleman_kernel({0, 0}, w, Maxwellian(2), p)).epsilon(0.01));
  }

  TEST_CASE("Lambda weight") {
    KernelParams p;  // gamma + 2s = 1
    const VelocityGrid g(2, 2.0, 64);
    CHECK(lambda_weight({0, 0}, rasterize(Indicator(2), g), p) == doctest::Approx(2 * M_PI / 3).epsilon(0.01));
    CHECK(lambda_weight({0, 0}, DistributionField::zero(g), p) == 0.0);
    const VelocityGrid gm(2, 6.0, 64);
    CHECK(lambda_weight({0, 0}, rasterize(Maxwellian(2), gm), p) == doctest::Approx(std::sqrt(M_PI / 2)).epsilon(2e-3));
  }
}
