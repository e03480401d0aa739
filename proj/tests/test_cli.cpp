#include <doctest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "carlab/io.hpp"
#include "carlab/quadrature.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = fs::path(CARLAB_TEST_DIR) / "cli_work";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / (name + ".json");
  std::ofstream(p) << text;
  return p;
}

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const fs::path log = kWork / "stdout.txt";
  fs::create_directories(kWork);
  const std::string cmd = std::string(CARLAB_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("kernel-eval") {
    const auto ind = write_config("indicator", R"({"kernel":{"d":2,"gamma":0,"s":0.5},"grid":{"v_max":4,"n":32},
      "initial":{"type":"indicator","radius":1,"height":1}})");
    Run r = run("kernel-eval --config " + ind.string() + " --v 0,0 --vprime 1,0");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["K"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(j["lambda"].get<double>() > 0.0);

    const auto zero = write_config("zero", R"({"grid":{"v_max":4,"n":16},"initial":{"type":"indicator","height":0}})");
    r = run("kernel-eval --config " + zero.string() + " --v 0,0 --vprime 1,0");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["K"].get<double>() == 0.0);

    CHECK(run("kernel-eval --config " + ind.string() + " --v 0.5,0 --vprime 0.5,0").code == 3);
    CHECK(run("kernel-eval --config " + ind.string() + " --v 0,0,0 --vprime 1,0").code == 2);
    CHECK(run("kernel-eval --config " + ind.string() + " --v 0,zero --vprime 1,0").code == 2);
  }

  TEST_CASE("configuration errors") {
    const auto bad_json = write_config("bad_json", "{\"kernel\": ");
    CHECK(run("solve --config " + bad_json.string() + " --out " + (kWork / "x").string()).code == 2);
    CHECK(run("solve --config " + (kWork / "missing.json").string()).code == 2);
    const auto neg = write_config("neg_dt", R"({"grid":{"v_max":4,"n":16},"solver":{"dt_init":-1}})");
    CHECK(run("solve --config " + neg.string() + " --out " + (kWork / "neg").string()).code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("verify --which bogus --out " + (kWork / "bogus").string()).code == 2);
    CHECK(run("lowerbound --mode sideways --out " + (kWork / "side").string()).code == 2);
  }

  TEST_CASE("solve") {
    const auto z = write_config("t0", R"({"grid":{"v_max":4,"n":16},"solver":{"t_end":0}})");
    const fs::path o0 = kWork / "solve_t0";
    REQUIRE(run("solve --config " + z.string() + " --out " + o0.string()).code == 0);
    CHECK(read_csv(o0 / "trace.csv").size() == 2);
    const auto back = carlab::read_field_csv((o0 / "field_final.csv").string());
    CHECK(back.values() == carlab::rasterize(carlab::Maxwellian(2), back.grid()).values());
    CHECK(fs::exists(o0 / "config.json"));

    const auto m = write_config("maxwell", R"({"grid":{"v_max":5,"n":20},"solver":{"t_end":0.01,"dt_init":0.005}})");
    const fs::path om = kWork / "solve_m";
    REQUIRE(run("solve --config " + m.string() + " --out " + om.string() + " --threads 1").code == 0);
    const auto rows = read_csv(om / "trace.csv");
    REQUIRE(rows.size() >= 3);
    const std::size_t e = column(rows[0], "entropy");
    for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][e]) <= std::stod(rows[k - 1][e]) + 1e-12);

    // the final field feeds back in as a CSV datum
    const auto csv = write_config("from_csv", R"({"grid":{"v_max":5,"n":20},"initial":{"type":"csv","path":")" +
                                                   (om / "field_final.csv").string() + "\"}}");
    const Run k = run("kernel-eval --config " + csv.string() + " --v 0,0 --vprime 1,0");
    REQUIRE(k.code == 0);
    CHECK(json::parse(k.out)["K"].get<double>() > 0.0);
  }

  TEST_CASE("lowerbound, analytic") {
    const auto a = write_config("analytic", R"({"kernel":{"d":2,"gamma":0,"s":0.5},"lowerbound":{"T0":1,"ell0":0.1,"n_max":30}})");
    const fs::path oa = kWork / "lb_analytic";
    REQUIRE(run("lowerbound --mode analytic --config " + a.string() + " --out " + oa.string()).code == 0);
    const auto rows = read_csv(oa / "spreading_states.csv");
    REQUIRE(rows.size() == 32);
    const std::size_t c = column(rows[0], "log_ell_n");
    std::vector<double> n, y;
    for (int k = 10; k <= 25; ++k) {
      n.push_back(k);
      y.push_back(std::log(-std::stod(rows[k + 1][c])));
    }
    CHECK(carlab::linear_fit(n, y).slope == doctest::Approx(std::log(2.0)).epsilon(0.05));
    CHECK(fs::exists(oa / "certificate.json"));

    const auto z = write_config("analytic0", R"({"lowerbound":{"T0":1,"ell0":0.1,"n_max":0}})");
    const fs::path oz = kWork / "lb_analytic0";
    REQUIRE(run("lowerbound --config " + z.string() + " --out " + oz.string()).code == 0);
    CHECK(read_csv(oz / "spreading_states.csv").size() == 2);
    CHECK(json::parse(slurp(oz / "certificate.json"))["b"].get<double>() == 0.0);
  }

  TEST_CASE("lowerbound, empirical on a Maxwellian") {
    const auto e = write_config("empirical", R"({"grid":{"v_max":4,"n":16},"solver":{"dt_init":0.005},
      "lowerbound":{"T0":0.02,"n_max":3}})");
    const fs::path oe = kWork / "lb_empirical";
    REQUIRE(run("lowerbound --mode empirical --config " + e.string() + " --out " + oe.string()).code == 0);
    CHECK(json::parse(slurp(oe / "certificate.json"))["pass"].get<bool>());
    CHECK(fs::exists(oe / "trace.csv"));
  }

  TEST_CASE("verify volumes is reproducible") {
    const auto v = write_config("volumes", R"({"kernel":{"d":2},"verify":{"mc_samples":1000000},"seeds":{"mc":3}})");
    const fs::path o1 = kWork / "vol1", o2 = kWork / "vol2";
    REQUIRE(run("verify --which volumes --config " + v.string() + " --out " + o1.string()).code == 0);
    REQUIRE(run("verify --which volumes --config " + v.string() + " --out " + o2.string()).code == 0);
    const json c = json::parse(slurp(o1 / "cone_volume.json"));
    const json s = json::parse(slurp(o1 / "cone_slice_volume.json"));
    CHECK(c["expected_exponent"].get<double>() == 1.5);
    CHECK(s["expected_exponent"].get<double>() == 0.5);
    for (const char* f : {"cone_volume.json", "cone_slice_volume.json", "summary.csv"})
      CHECK(slurp(o1 / f) == slurp(o2 / f));
    CHECK(read_csv(o1 / "summary.csv").size() == 3);
  }
}
