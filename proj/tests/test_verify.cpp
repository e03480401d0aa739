#include <doctest.h>

#include <cmath>

#include "carlab/errors.hpp"
#include "carlab/verify.hpp"

using namespace carlab;

TEST_SUITE("verify") {
  TEST_CASE("helpers") {
    CHECK(relative_change(0.0, 0.0) == 0.0);
    CHECK(relative_change(1.0, 1.25) == doctest::Approx(0.2));
    CHECK(relative_change(-2.0, 2.0) == doctest::Approx(2.0));
    CHECK(default_r_sweep().front() == doctest::Approx(0.2));
    CHECK(default_r_sweep().back() == doctest::Approx(1.0));
    CHECK(default_xi_sweep().size() == 6);
    CHECK(default_xi_sweep().back() == doctest::Approx(0.2));
    for (const auto& u : default_u_sweep(2, 4.0)) CHECK(u.norm() <= 2.0);
  }

  TEST_CASE("two-term minimizer against the proof radius") {
    std::vector<double> r;
    for (int k = 0; k <= 4000; ++k) r.push_back(0.01 * std::pow(1e4, k / 4000.0));
    // argmin of A r^{2-2s} + B r^{-2s} is sqrt(s B / ((1 - s) A))
    CHECK(two_term_argmin_ratio(3.0, 2.0, 0.5, r) == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(two_term_argmin_ratio(3.0, 2.0, 0.25, r) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(2e-3));
  }

  TEST_CASE("discrete C2 seminorm") {
    const VelocityGrid g(2, 2.0, 16);
    GridFunction q(g);
    for (std::size_t i = 0; i < g.size(); ++i) q[i] = g.node(i).norm2();
    // |phi(v') - phi(v) - (v' - v).grad phi(v)| = |v' - v|^2 exactly at v = 0
    CHECK(c2_seminorm(q, g.flat({8, 8, 0})) == doctest::Approx(1.0).epsilon(1e-12));
    GridFunction lin(g);
    for (std::size_t i = 0; i < g.size(); ++i) lin[i] = 1.0 + g.node(i)[0];
    CHECK(c2_seminorm(lin, g.flat({8, 8, 0})) > 0.0);  // the zero ghost ring is not linear
  }

  TEST_CASE("cone volume reports are seeded") {
    const auto a = verify_volumes(2, default_xi_sweep(), 1000000, 9);
    const auto b = verify_volumes(2, default_xi_sweep(), 1000000, 9);
    REQUIRE(a.size() == 2);
    CHECK(a[0].expected_exponent == 1.5);
    CHECK(a[1].expected_exponent == 0.5);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].measured_exponent == b[k].measured_exponent);
      CHECK(a[k].measured_constant == b[k].measured_constant);
    }
    CHECK(verify_volumes(3, default_xi_sweep(), 1000000, 9)[1].expected_exponent == 1.0);
  }

  TEST_CASE("Lambda growth on a coarse grid") {
    KernelParams p;
    const auto reps = verify_lambda_growth(Indicator(2), VelocityGrid(2, 2.0, 16), p, default_lambda_norms());
    REQUIRE(!reps.empty());
    CHECK(reps[0].pass);
    CHECK(reps[0].expected_exponent == 1.0);
  }

  TEST_CASE("report finalize") {
    EstimateReport r;
    r.measured_constant = 1.0;
    r.measured_exponent = 1.04;
    r.expected_exponent = 1.0;
    r.tolerance = 0.05;
    r.finalize();
    CHECK(r.pass);
    r.measured_constant = NAN;
    r.finalize();
    CHECK_FALSE(r.pass);
  }
}
