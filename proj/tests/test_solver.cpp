#include <doctest.h>

#include <cmath>

#include "carlab/errors.hpp"
#include "carlab/solver.hpp"

using namespace carlab;

TEST_SUITE("solver") {
  TEST_CASE("hydrodynamic diagnostics") {
    // point sampling, so every cell holds 1/pi or 0
    const VelocityGrid g(2, 2.0, 128);
    const auto f = rasterize(Indicator(2, 1.0, 1.0 / M_PI), g, 1);
    const auto d = hydro_diagnostics(f);
    CHECK(d.mass == doctest::Approx(1.0).epsilon(5e-3));  // lattice-point count of the disc
    CHECK(d.energy == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(d.entropy == doctest::Approx(std::log(1 / M_PI)).epsilon(1e-2));

    const auto z = hydro_diagnostics(DistributionField::zero(g));
    CHECK(z.mass == 0.0);
    CHECK(z.energy == 0.0);
    CHECK(z.entropy == 0.0);

    const auto M = rasterize(Maxwellian(2), VelocityGrid(2, 6.0, 64));
    CHECK(hydro_diagnostics(M).mass == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("hydrodynamic bounds") {
    const auto M = rasterize(Maxwellian(2), VelocityGrid(2, 6.0, 32));
    CHECK(check_hydro_bounds(M, {0.5, 2, 2, 1}).all());
    const auto z = check_hydro_bounds(DistributionField::zero(M.grid()), {0.1, 2, 2, 1});
    CHECK_FALSE(z.mass_lower);
    const auto a = check_hydro_bounds(M, {0.5, 2, 2, 1}), b = check_hydro_bounds(M.scaled(2.0), {0.5, 2, 2, 1});
    CHECK(b.measured.mass == doctest::Approx(2 * a.measured.mass).epsilon(1e-14));
    CHECK(b.measured.energy == doctest::Approx(2 * a.measured.energy).epsilon(1e-14));
    CHECK_THROWS_AS(check_hydro_bounds(M, {0.0, 2, 2, 1}), ConfigError);
  }

  TEST_CASE("plateau") {
    const VelocityGrid g(2, 4.0, 32);
    CHECK(measure_plateau(rasterize(Maxwellian(2), g, 1), 1.0) ==
          doctest::Approx(std::exp(-0.5) / (2 * M_PI)).epsilon(1e-12));
    CHECK(measure_plateau(DistributionField(GridFunction(g, 0.3)), 2.0) == 0.3);
    CHECK(measure_plateau(rasterize(Indicator(2, 2.0), g), 1.0) == 1.0);
    CHECK_THROWS_AS(measure_plateau(DistributionField::zero(g), 5.0), InputError);
  }

  TEST_CASE("stepping with stub right-hand sides") {
    const VelocityGrid g(2, 4.0, 16);
    const auto f = rasterize(Maxwellian(2), g);
    const Rhs zero = [](const DistributionField& x) { return GridFunction(x.grid()); };
    const auto r = step(f, 0.1, zero);
    CHECK(r.f.values() == f.values());
    CHECK(r.halvings == 0);

    // dq/dt = -2 f: midpoint gives f (1 - 2 dt + 2 dt^2)
    const Rhs decay = [](const DistributionField& x) {
      GridFunction out = x.function();
      for (auto& v : out.values()) v *= -2.0;
      return out;
    };
    const auto d = step(f, 0.1, decay);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(d.f[i] == doctest::Approx(f[i] * 0.82).epsilon(1e-14));

    // a step that always goes negative ends in StiffnessError
    const Rhs drain = [](const DistributionField& x) { return GridFunction(x.grid(), -1.0); };
    CHECK_THROWS_AS(step(f, 1.0, drain), StiffnessError);

    CHECK_THROWS_AS(step(f, 0.0, zero), InputError);
    const auto z = step(DistributionField::zero(g), 1e-3, KernelParams{});
    CHECK(z.f.is_zero());
  }

  TEST_CASE("solve plumbing") {
    const VelocityGrid g(2, 4.0, 16);
    const auto f = rasterize(Maxwellian(2), g);
    const Rhs zero = [](const DistributionField& x) { return GridFunction(x.grid()); };
    const auto s0 = solve(f, 0.0, zero);
    CHECK(s0.trace.rows() == 1);
    CHECK(s0.f.values() == f.values());

    SolveOptions o;
    o.dt_init = 0.03;
    o.stop_times = {0.05, 0.07};
    std::vector<double> seen;
    o.observer = [&](double t, const DistributionField&) { seen.push_back(t); };
    const auto s = solve(f, 0.1, zero, o);
    CHECK(s.trace.t.back() == 0.1);
    CHECK(std::find(seen.begin(), seen.end(), 0.05) != seen.end());
    CHECK(std::find(seen.begin(), seen.end(), 0.07) != seen.end());
    CHECK(seen.front() == 0.0);
    CHECK_FALSE(s.trace.drift_flag);

    o.dt_init = -1.0;
    CHECK_THROWS_AS(solve(f, 0.1, zero, o), ConfigError);
  }

  TEST_CASE("Maxwellian is stationary to the step tolerance") {
    const VelocityGrid g(2, 6.0, 48);
    const auto M = rasterize(Maxwellian(2), g);
    const auto r = step(M, 1e-3, KernelParams{});
    double worst = 0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(r.f[i] - M[i]));
    CHECK(worst / M.sup() <= 1e-3);
  }

  TEST_CASE("two bumps: entropy decays and the vacuum fills in") {
    const VelocityGrid g(2, 4.0, 16);
    const auto f0 = rasterize(TwoBumps::standard(2), g);
    REQUIRE(measure_plateau(f0, 1.0) == 0.0);
    SolveOptions o;
    o.dt_init = 2e-3;
    const auto s = solve(f0, 0.02, KernelParams{}, o);
    CHECK(s.trace.entropy.back() < s.trace.entropy.front());
    CHECK(measure_plateau(s.f, 1.0) > 0.0);
    CHECK_FALSE(s.trace.entropy_flag);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(s.f[i] >= 0.0);
  }
}
