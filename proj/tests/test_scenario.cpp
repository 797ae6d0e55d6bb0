// SPDX-License-Identifier: Apache-2.0
#include "qdephase/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace qdephase;

TEST_SUITE_BEGIN("scenario");

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const char* kSmallConfig = R"(
# three-qubit freezing sweep, coarse grid
[run]
output = test_sweep_out.csv
seed = 7

[scenario]
id = ghz
qubits = 3
state = ghz
alpha = 0.99
orientation = 1 0 0
spectral = cauchy
sweep = t
t-start = 0
t-stop = 2
t-step = 1
quantities = negativity

[scenario]
id = w-svet
qubits = 3
state = w
alpha = 0.99
orientation = 1 0 0
sweep = t
t-start = 0
t-stop = 1
t-step = 0.5
quantities = svetlichny
svetlichny-family = w
)";

}  // namespace

TEST_CASE("config parsing and validation") {
  const RunConfig cfg = parse_config_text(kSmallConfig, "test.cfg");
  CHECK(cfg.output == "test_sweep_out.csv");
  CHECK(cfg.seed == 7);
  REQUIRE(cfg.scenarios.size() == 2);
  CHECK(cfg.scenarios[0].id == "ghz");
  CHECK(cfg.scenarios[0].quantities ==
        std::vector<Quantity>{Quantity::Negativity});
  CHECK(cfg.scenarios[1].svet_family == SettingFamily::W);
  CHECK(cfg.scenarios[0].orientation.nx == doctest::Approx(1.0));
}

TEST_CASE("config errors carry location context") {
  CHECK_THROWS_AS(parse_config_text("[run]\nbogus = 1\n", "x.cfg"),
                  ConfigParseError);
  CHECK_THROWS_AS(parse_config_text("key = 1\n", "x.cfg"), ConfigParseError);
  // empty quantities list
  const char* no_quant = R"(
[run]
output = o.csv
[scenario]
id = a
qubits = 3
state = ghz
orientation = 1 0 0
sweep = t
t-start = 0
t-stop = 1
t-step = 0.5
)";
  CHECK_THROWS_WITH_AS(parse_config_text(no_quant, "x.cfg"),
                       doctest::Contains("quantities"), ConfigParseError);
  // negativity and asymptotic-negativity collide on the E column
  std::string both = no_quant;
  both += "quantities = negativity,asymptotic-negativity\n";
  CHECK_THROWS_AS(parse_config_text(both, "x.cfg"), ConfigParseError);
  // empty sweep range
  std::string bad_range = no_quant;
  bad_range += "quantities = negativity\nt-step = -1\n";
  CHECK_THROWS_AS(parse_config_text(bad_range, "x.cfg"), ConfigParseError);
}

TEST_CASE("csv schema and formatting") {
  SweepRecord r;
  r.scenario = "demo";
  r.t = 0.5;
  r.alpha = 0.99;
  r.nx = 1;
  r.e = 0.25;
  const std::string csv = format_csv({r});
  CHECK(csv.rfind("scenario,t,alpha,nx,ny,nz,E,S,S_setting,status\n", 0) == 0);
  CHECK(csv.find("demo,0.5,0.99,1,0,1,0.25,,,ok\n") != std::string::npos);
}

TEST_CASE("run_scenarios produces a deterministic grid") {
  const RunConfig cfg = parse_config_text(kSmallConfig, "test.cfg");
  const auto records = run_scenarios(cfg);
  REQUIRE(records.size() == 3 + 3);
  CHECK(records[0].scenario == "ghz");
  CHECK(records[0].t == 0.0);
  CHECK(records[2].t == 2.0);
  // E at t=0 for the 0.99 GHZ mixture is just below 1/2
  CHECK(*records[0].e == doctest::Approx(0.495).epsilon(2e-3));
  // svetlichny rows carry the setting tag and |<S>| <= 4 sqrt 2
  CHECK(records[3].s.has_value());
  CHECK(!records[3].s_setting.empty());
  CHECK(*records[3].s <= 4 * std::sqrt(2.0) + 1e-9);

  const std::string csv_a = format_csv(records);
  const std::string csv_b = format_csv(run_scenarios(cfg));
  CHECK(csv_a == csv_b);  // byte determinism
}

TEST_CASE("run_scenario_file writes csv atomically with summary") {
  const std::string cfg_path = "test_scenario_file.cfg";
  {
    std::ofstream os(cfg_path);
    os << kSmallConfig;
  }
  std::ostringstream summary;
  run_scenario_file(cfg_path, summary, /*emit_gnuplot=*/true);
  const std::string csv = slurp("test_sweep_out.csv");
  CHECK(csv.rfind("scenario,", 0) == 0);
  CHECK(summary.str().find("scenario ghz") != std::string::npos);
  CHECK(summary.str().find("max |dE|") != std::string::npos);
  const std::string gp = slurp("test_sweep_out.csv.gp");
  CHECK(gp.find("plot") != std::string::npos);
  std::remove(cfg_path.c_str());
  std::remove("test_sweep_out.csv");
  std::remove("test_sweep_out.csv.gp");
}

TEST_CASE("state file input feeds a sweep") {
  std::mt19937_64 gen(119);
  const DensityMatrix rho = testing::random_density(3, gen);
  save_state("test_scn_state.txt", rho);
  Scenario sc;
  sc.qubits = 3;
  sc.state = "file:test_scn_state.txt";
  const DensityMatrix loaded = scenario_initial_state(sc, 1.0);
  CHECK((loaded.matrix - rho.matrix).norm() == 0.0);
  // alpha mixing applies to file states too
  const DensityMatrix mixed = scenario_initial_state(sc, 0.5);
  CHECK(std::abs(mixed.matrix.trace().real() - 1.0) < 1e-12);
  std::remove("test_scn_state.txt");
}

TEST_CASE("ensemble runs are seeded and deterministic") {
  EnsembleConfig cfg;
  cfg.qubits = 3;
  cfg.count = 3;
  cfg.alpha = 0.95;
  cfg.orientation = FieldOrientation::normalized(1, 0, 0);
  cfg.seed = 11;
  cfg.t_start = 0.0;
  cfg.t_stop = 1.0;
  cfg.t_step = 0.5;
  cfg.output = "test_ens.csv";
  std::ostringstream summary;
  run_ensemble(cfg, summary);
  const std::string a = slurp("test_ens.csv");
  const std::string am = slurp("test_ens-mean.csv");
  CHECK(a.find("sample-000") != std::string::npos);
  CHECK(am.find("mean") != std::string::npos);
  run_ensemble(cfg, summary);
  CHECK(slurp("test_ens.csv") == a);  // identical seed, identical bytes
  CHECK(slurp("test_ens-mean.csv") == am);

  // count = 1 reproduces the single random_pure trajectory
  EnsembleConfig one = cfg;
  one.count = 1;
  one.output = "test_ens1.csv";
  run_ensemble(one, summary);
  const DephasingChannel ch(3, cfg.orientation);
  RandomStateSeed seed{derive_seed(cfg.seed, 0)};
  const DensityMatrix rho = white_noise_mix(random_pure(3, seed), cfg.alpha);
  const double direct = genuine_negativity(ch.evolve(rho, 1.0)).value;
  const std::string ones = slurp("test_ens1.csv");
  char expect[64];
  std::snprintf(expect, sizeof expect, ",%.12g,", direct);
  CHECK(ones.find(expect) != std::string::npos);
  std::remove("test_ens.csv");
  std::remove("test_ens-mean.csv");
  std::remove("test_ens1.csv");
  std::remove("test_ens1-mean.csv");

  EnsembleConfig bad = cfg;
  bad.count = 0;
  CHECK_THROWS_AS(run_ensemble(bad, summary), ConfigParseError);
}

TEST_SUITE_END();
