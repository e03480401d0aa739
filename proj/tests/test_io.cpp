#include <doctest.h>

#include <sstream>

#include "carlab/errors.hpp"
#include "carlab/io.hpp"

using namespace carlab;
using nlohmann::json;

TEST_SUITE("io") {
  TEST_CASE("config parsing") {
    const RunConfig def = parse_config(json::object());
    CHECK(def.kernel.d == 2);
    CHECK(def.n == 48);
    CHECK(def.initial.type == "maxwellian");

    const json j = json::parse(R"({"kernel":{"d":3,"gamma":-0.5,"s":0.25,"tilde_b":[1,0.5],"theta_min":0.1},
      "grid":{"v_max":5,"n":20},"solver":{"dt_init":0.002,"t_end":0.05,"plateau_radii":[1,1.5]},
      "initial":{"type":"two_bumps","centers":[[1,0,0],[-1,0,0]],"radius":0.8},
      "lowerbound":{"T0":0.5,"c_s":2,"n_max":4,"ell0":0.05},"verify":{"mc_samples":1000},"seeds":{"mc":7},"threads":1})");
    const RunConfig c = parse_config(j);
    CHECK(c.kernel.d == 3);
    CHECK(c.kernel.tilde_b.coefficients().size() == 2);
    CHECK(*c.kernel.theta_min == 0.1);
    CHECK(c.initial.centers.size() == 2);
    CHECK(*c.ell0 == 0.05);
    CHECK(c.seed == 7);
    // echo round-trips
    CHECK(config_to_json(parse_config(config_to_json(c))) == config_to_json(c));

    CHECK_THROWS_AS(parse_config(json::parse(R"({"kernel":{"dd":2}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"bogus":1})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"solver":{"dt_init":-1}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"kernel":{"s":1.5}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"initial":{"type":"plane"}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"grid":{"n":"many"}})")), ConfigError);
  }

  TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 6.02e23, -2.5e-300, 0.0})
      CHECK(std::stod(format_double(x)) == x);
  }

  TEST_CASE("field CSV round trip is exact") {
    const VelocityGrid g(2, 3.0, 12);
    const auto f = rasterize(TwoBumps::standard(2), g);
    std::ostringstream a;
    write_field_csv(a, f.function());
    CHECK(a.str().rfind("i1,i2,v1,v2,f\n", 0) == 0);
    std::istringstream in(a.str());
    const DistributionField back = read_field_csv(in);
    CHECK(back.grid() == g);
    CHECK(back.values() == f.values());
    std::ostringstream b;
    write_field_csv(b, back.function());
    CHECK(a.str() == b.str());

    std::istringstream broken("i1,i2,v1,v2,f\n0,0,-3,-3,x\n");
    CHECK_THROWS_AS(read_field_csv(broken), InputError);
  }

  TEST_CASE("trace and states tables") {
    SolveTrace tr;
    tr.t = {0, 0.1};
    tr.mass = {1, 1};
    tr.energy = {2, 2};
    tr.entropy = {-1, -1.1};
    tr.sup_f = {0.2, 0.19};
    tr.dt = {0, 0.1};
    tr.clamped_mass = {0, 0};
    tr.plateau_radii = {1.0};
    tr.plateau = {{0.0, 0.01}};
    std::ostringstream os;
    write_trace_csv(os, tr);
    CHECK(os.str().rfind("t,mass,energy,entropy,sup_f,plateau_R1,dt,clamped_mass\n", 0) == 0);

    std::ostringstream st;
    write_states_csv(st, {SpreadingState{0, 0.25, 1.0, 0.0, 0.1, std::log(0.1)}});
    CHECK(st.str().rfind("n,xi_n,R_n,T_n,ell_n,log_ell_n\n0,0.25,1,0,0.10000000000000001,", 0) == 0);
  }
}
