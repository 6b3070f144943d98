#include <doctest.h>

#include <nlohmann/json.hpp>

#include "entlat/cli_commands.hpp"

using namespace entlat;

namespace {

RunConfig base_config(int n) {
  RunConfig c;
  c.n = n;
  return c;
}

}  // namespace

TEST_CASE("error-analysis subset list for N = 10") {
  const auto subsets = error_analysis_subsets(10);
  const std::vector<std::vector<int>> expected = {
      {1, 2}, {1, 3},
      {1, 2, 3, 4}, {1, 2, 3, 5},
      {1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 7},
      {1, 2, 3, 4, 5, 6, 7, 8}, {1, 2, 3, 4, 5, 6, 7, 9},
      {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}};
  CHECK(subsets == expected);
}

TEST_CASE("prepare summary") {
  RunConfig c = base_config(10);
  c.subcommand = "prepare";
  const nlohmann::json out = cmd_prepare(c);
  CHECK(out["support_check"] == true);
  CHECK(out["max_lambda1_all_bipartitions"].get<double>() == doctest::Approx(0.625).epsilon(1e-9));
  CHECK(out["max_proper_subsystem_purity"].get<double>() < 1.0);
  CHECK(out["config"]["n"] == 10);

  RunConfig c2 = base_config(2);
  const nlohmann::json out2 = cmd_prepare(c2);
  CHECK(out2["single_boundary_cuts"][0]["lambda1"].get<double>() == doctest::Approx(0.5));

  RunConfig bad = base_config(7);
  CHECK_THROWS_AS(cmd_prepare(bad), ConfigError);
}

TEST_CASE("witness subcommand") {
  SUBCASE("fidelity method, noiseless") {
    RunConfig c = base_config(8);
    c.method = "fidelity";
    const nlohmann::json out = cmd_witness(c);
    CHECK(out["report"]["verdict"] == "GME");
    CHECK(out["report"]["derived"]["fidelity_bound"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out["report"]["derived"]["lms_count"] == 18);
  }

  SUBCASE("homogeneous method, noiseless n = 10") {
    RunConfig c = base_config(10);
    c.method = "homogeneous";
    const nlohmann::json out = cmd_witness(c);
    CHECK(out["report"]["verdict"] == "fully-entangled");
    for (const auto& check : out["report"]["trace"]) {
      CHECK(check["value"].get<double>() == doctest::Approx(1.5).epsilon(1e-9));
    }
  }

  SUBCASE("white noise at the N = 10 threshold is a boundary case") {
    RunConfig c = base_config(10);
    c.method = "fidelity";
    c.noise.p_white = 0.075;
    const nlohmann::json out = cmd_witness(c);
    CHECK(out["report"]["verdict"] == "boundary");
    CHECK(out["report"]["derived"]["fidelity_bound"].get<double>() ==
          doctest::Approx(0.625).epsilon(1e-9));
  }

  SUBCASE("reverse method emits the checkpoint series") {
    RunConfig c = base_config(6);
    c.method = "reverse";
    const nlohmann::json out = cmd_witness(c);
    CHECK(out["report"]["checkpoints"].size() == 7);
    CHECK(out["report"]["gme_by_inferred"] == true);
  }

  SUBCASE("unknown method rejected") {
    RunConfig c = base_config(6);
    c.method = "tomography";
    CHECK_THROWS_AS(cmd_witness(c), ConfigError);
  }

  SUBCASE("stochastic runs demand a seed") {
    RunConfig c = base_config(6);
    c.method = "fidelity";
    c.shots = 100;
    CHECK_THROWS_AS(cmd_witness(c), ConfigError);
    c.seed_set = true;
    CHECK_NOTHROW(cmd_witness(c));
  }

  SUBCASE("identical config and seed give byte-identical reports") {
    RunConfig c = base_config(6);
    c.method = "fidelity";
    c.shots = 500;
    c.seed = 31337;
    c.seed_set = true;
    c.noise.p_white = 0.02;
    const std::string a = cmd_witness(c).dump();
    const std::string b = cmd_witness(c).dump();
    CHECK(a == b);
  }
}

TEST_CASE("sweep subcommand") {
  SUBCASE("fig5a header, determinism and crossing") {
    RunConfig c = base_config(10);
    c.figure = "fig5a";
    const SweepOutput out = cmd_sweep(c);
    CHECK(out.csv.rfind("param,value,subset,witness_value,stderr\n", 0) == 0);
    const SweepOutput again = cmd_sweep(c);
    CHECK(out.csv == again.csv);  // byte-identical
    const double crossing = out.sidecar["witness_crossings"]["1+2+3+4+5+6"].get<double>();
    CHECK(std::abs(crossing - 0.95) < 0.01);
  }

  SUBCASE("hubbard sweep contains the exact fast-gate row") {
    RunConfig c = base_config(10);
    c.figure = "hubbard";
    const SweepOutput out = cmd_sweep(c);
    CHECK(out.csv.rfind("v_over_j,t,gate_fidelity,leakage\n", 0) == 0);
    bool found = false;
    std::istringstream is(out.csv);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
      const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
      const auto c3 = line.rfind(',');
      const double v = std::stod(line.substr(0, c1));
      const double f = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
      if (v < 10.0 && f >= 0.999) found = true;
    }
    CHECK(found);
  }

  SUBCASE("unknown figure rejected") {
    RunConfig c = base_config(10);
    c.figure = "fig9";
    CHECK_THROWS_AS(cmd_sweep(c), ConfigError);
  }
}
