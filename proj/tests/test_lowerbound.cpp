#include <doctest.h>

#include <cmath>

#include "carlab/errors.hpp"
#include "carlab/lowerbound.hpp"
#include "carlab/quadrature.hpp"

using namespace carlab;

TEST_SUITE("lowerbound") {
  TEST_CASE("bump profile") {
    for (double xi : {0.05, 0.1, 0.25})
      for (double R : {1.0, 1.7, 3.0}) {
        const BumpSpec b{R, xi};
        CHECK(bump({0, 0}, b) == 1.0);
        CHECK(bump({b.outer_radius(), 0}, b) == 0.0);
        CHECK(bump({0, 0, 0.5 * (b.inner_radius() + b.outer_radius())}, b) == doctest::Approx(0.5).epsilon(1e-12));
        double prev = 1.0;
        for (int k = 0; k <= 50; ++k) {
          const double r = b.inner_radius() + (b.outer_radius() - b.inner_radius()) * k / 50.0;
          const double x = bump({r, 0}, b);
          CHECK(x <= prev);
          prev = x;
        }
        CHECK(bump_second_difference_sup(b, 1e-3 * R * xi) <= 40.0 / (R * xi * R * xi));
      }
  }

  TEST_CASE("barrier") {
    KernelParams kp;  // q = 6
    // A = alpha xi^6 ell^2 = 1 and B = C / xi = 1
    const BarrierParams p = BarrierParams::from(kp, 0.5, 0.25, 0.25, 1.0, std::sqrt(8192.0));
    CHECK(barrier(0.0, p) == 0.0);
    REQUIRE(p.source() == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(p.rate() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(barrier(1.0, p) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(barrier(1e3, p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(barrier(1.0, BarrierParams{}), InputError);  // q unset

    double worst = 0;
    for (double C : {0.01, 0.1, 1.0, 10.0})
      for (double xi : {0.02, 0.1, 0.25})
        for (double ell : {1e-3, 0.1}) {
          const auto b = BarrierParams::from(kp, 0.5, C, xi, 1.5, ell);
          for (double t : {0.01, 0.1, 1.0, 10.0}) worst = std::max(worst, barrier_ode_residual(t / b.rate(), b));
        }
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("spreading step") {
    KernelParams p;  // q = 6
    const auto r = spread_step(0.1, 1.0, 0.1, 1.0, p);
    CHECK(r.ell == doctest::Approx(1e-9).epsilon(1e-12));
    CHECK(r.R == doctest::Approx(std::sqrt(2.0) * 0.9).epsilon(1e-15));
    CHECK(spread_step(0.0, 1.0, 0.1, 1.0, p).ell == 0.0);
    CHECK(spread_step(0.1, 1.0, 0.1, 1.0, p, 2.0).ell == doctest::Approx(2e-9).epsilon(1e-12));
    CHECK_THROWS_AS(spread_step(0.9, 100.0, 0.25, 1.0, p), PreconditionError);
  }

  TEST_CASE("schedules") {
    CHECK(time_schedule(1, 1.0) == 0.5);
    CHECK(time_schedule(2, 1.0) == 0.75);
    CHECK(xi_schedule(0) == 0.25);
    const auto R = radius_schedule(40);
    CHECK(R[0] == 1.0);
    CHECK(R[1] == doctest::Approx(1.0606601717798214).epsilon(1e-15));
    // R_n / 2^{n/2} settles to a positive constant
    const double a = R[30] / std::pow(2.0, 15.0), b = R[40] / std::pow(2.0, 20.0);
    CHECK(a > 0.1);
    CHECK(std::abs(a - b) <= 1e-6 * a);
  }

  TEST_CASE("analytic recursion: doubly exponential decay") {
    KernelParams p;
    const auto st = iterate(1.0, 0.1, p, 1.0, 30);
    REQUIRE(st.size() == 31);
    CHECK(st[0].ell == 0.1);
    CHECK(st[1].T == 0.5);
    std::vector<double> n, y;
    for (int k = 10; k <= 25; ++k) {
      n.push_back(k);
      y.push_back(std::log(-st[k].log_ell));
    }
    CHECK(linear_fit(n, y).slope == doctest::Approx(std::log(2.0)).epsilon(0.05));
    for (const auto& s : st) CHECK(std::isfinite(s.log_ell));

    CHECK_THROWS_AS(iterate(1.0, 0.5, p, 1e12, 5), PreconditionError);
    CHECK_THROWS_AS(iterate(0.0, 0.1, p, 1.0, 5), InputError);
    CHECK_THROWS_AS(iterate(0.5, 1.0, p, 1.0, 5), InputError);
  }

  TEST_CASE("Gaussian fit") {
    std::vector<SpreadingState> st(3);
    const double ell[] = {0.1, 0.01, 1e-4};
    const auto R = radius_schedule(2);
    for (int k = 0; k < 3; ++k) {
      st[k].n = k;
      st[k].R = R[k];
      st[k].ell = ell[k];
      st[k].log_ell = std::log(ell[k]);
    }
    const auto g = fit_gaussian(st);
    CHECK(g.a == 0.1);
    CHECK(g.b == doctest::Approx(std::log(1e3) / 1.125).epsilon(1e-12));
    CHECK(g.b == doctest::Approx(6.1402).epsilon(1e-4));
    CHECK(fit_is_sound(g, st));
    CHECK_FALSE(fit_is_sound({0.1, 0.5 * g.b}, st));

    CHECK(fit_gaussian({st[0]}).b == 0.0);
    auto flat = st;
    for (auto& s : flat) {
      s.ell = 0.1;
      s.log_ell = std::log(0.1);
    }
    CHECK(fit_gaussian(flat).b == 0.0);
    CHECK_THROWS_AS(fit_gaussian({}), InputError);

    // underflowed plateaus are compared in logs
    const auto deep = iterate(1.0, 0.1, KernelParams{}, 1.0, 20);
    REQUIRE(deep.back().ell == 0.0);
    CHECK(fit_is_sound(fit_gaussian(deep), deep));
  }

  TEST_CASE("certificate") {
    const VelocityGrid g(2, 4.0, 32);
    const auto M = rasterize(Maxwellian(2), g, 1);
    CHECK(certify(M, {0.1, 1.0}).pass);
    const auto bad = certify(M, {1.0, 1.0});
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_node.norm() == 0.0);
    CHECK_FALSE(certify(DistributionField::zero(g), {0.1, 1.0}).pass);
    CHECK(certify(M, {0.1, 1.0}, 1.0).nodes_checked < g.size());
  }

  TEST_CASE("empirical spreading") {
    const VelocityGrid g(2, 4.0, 32);
    const auto M = rasterize(Maxwellian(2), g);
    const double T0 = 0.1;
    std::vector<std::pair<double, DistributionField>> snaps;
    for (int n = 1; n <= 5; ++n) snaps.emplace_back(time_schedule(n, T0), M);
    const auto e = empirical_spreading(snaps, T0);
    REQUIRE(e.bound);
    REQUIRE(e.certificate);
    CHECK(e.certificate->pass);
    CHECK(fit_is_sound(*e.bound, e.states));
    CHECK(e.states.size() >= 4);

    std::vector<std::pair<double, DistributionField>> zeros;
    for (int n = 1; n <= 3; ++n) zeros.emplace_back(time_schedule(n, T0), DistributionField::zero(g));
    const auto z = empirical_spreading(zeros, T0);
    CHECK_FALSE(z.bound);
    CHECK_FALSE(z.message.empty());
  }
}
