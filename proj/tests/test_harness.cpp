#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "rlcc/harness.hpp"

using namespace rlcc;

TEST_CASE("rational parsing is decimal") {
  CHECK(parse_rational("0.9") == Rational(9, 10));
  CHECK(parse_rational("0.12") == Rational(3, 25));
  CHECK(parse_rational("010") == 10);
  CHECK(parse_rational("1/08") == Rational(1, 8));
  CHECK(parse_rational("-0.5") == Rational(-1, 2));
  CHECK(parse_rational("4881/4913") == Rational(4881, 4913));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("0x10"));
  CHECK_THROWS(parse_rational("1.2.3"));
  CHECK_THROWS(parse_rational("-"));
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(
      "# comment\n"
      "trials = 50   # inline\n"
      "delta = 0.05\n"
      "preset = S1\n"
      "epsilons = 1/8, 1/4\n");
  CHECK(cfg.p == 17);
  CHECK(cfg.m == 3);
  CHECK(cfg.d == 32);
  CHECK(cfg.trials == 50);
  CHECK(cfg.delta == Rational(1, 20));
  CHECK(cfg.epsilons.size() == 2);
  CHECK(cfg.alpha_value() == cfg.rm().rho / 8);
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("trials = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("preset = T9\n"), ConfigError);

  auto named = default_config();
  apply_preset(named, "soundness-S1");
  CHECK(named.experiment == "soundness-exp");
  CHECK(named.delta == Rational(1, 10));
  CHECK(named.strategy == "targeted");
}

TEST_CASE("preconditions gate the soundness experiments") {
  auto cfg = default_config();
  apply_preset(cfg, "T2");
  cfg.experiment = "soundness-exp";
  cfg.alpha = Rational(1, 2);
  const auto pre = check_preconditions(cfg);
  CHECK_THROWS_AS(gate_preconditions(cfg, pre), ConfigError);
  try {
    gate_preconditions(cfg, pre);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("alpha <= rho/8") != std::string::npos);
  }
  cfg.unsound = true;
  CHECK_NOTHROW(gate_preconditions(cfg, pre));
  cfg.experiment = "sweep";
  cfg.unsound = false;
  CHECK_NOTHROW(gate_preconditions(cfg, check_preconditions(cfg)));
  cfg.d = 8;
  CHECK_THROWS_AS(gate_preconditions(cfg, check_preconditions(cfg)), ConfigError);
}

TEST_CASE("formula values") {
  auto cfg = default_config();
  apply_preset(cfg, "S1");
  const auto s = formula_eval("sigma_rw", cfg);
  CHECK(to_decimal(s.exact) == "0.705461");
  CHECK_FALSE(s.vacuous);
  CHECK(to_decimal(formula_eval("endpoint_bound", cfg).exact) == "0.217647");
  const auto rl = formula_eval("sigma_rlcc", cfg);
  REQUIRE(rl.extra.size() == 2);
  CHECK(rl.extra[0].second == s.exact / 4);
  CHECK(rl.exact == s.exact / 4 * cfg.rm().rho);
  CHECK(rl.extra[1].second == Rational(1, 40));
  const auto b = formula_eval("predicate_count", cfg);
  BigInt expected = 2;
  for (int i = 0; i < 5; ++i) expected *= 4913;
  for (int i = 0; i < 6; ++i) expected *= 17;
  CHECK(b.exact == Rational(expected));

  auto t1 = default_config();
  apply_preset(t1, "T1");
  CHECK(formula_eval("sigma_rw", t1).vacuous);
  CHECK(formula_eval("block_length", t1).extra[0].second == 31104);
  t1.alpha = t1.rm().rho / 2;
  CHECK_THROWS_AS(formula_eval("sigma_rw", t1), std::domain_error);
  CHECK_THROWS_AS(formula_eval("nope", t1), ConfigError);
}

TEST_CASE("reports are deterministic given the seed") {
  auto cfg = default_config();
  apply_preset(cfg, "completeness-T2");
  cfg.trials = 100;
  cfg.threads = 2;
  auto a = run_experiment(cfg);
  cfg.threads = 1;
  auto b = run_experiment(cfg);
  CHECK(a.pass);
  CHECK(a.report["result"]["accepted"] == 100);
  a.report.erase("timing");
  b.report.erase("timing");
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.csv_rows == b.csv_rows);
  cfg.seed = 2;
  CHECK(config_hash(cfg) != a.report["config_hash"].get<std::string>());
}

TEST_CASE("calibration sidecar is reused") {
  auto cfg = default_config();
  apply_preset(cfg, "T1");
  cfg.experiment = "calibrate";
  cfg.calibration_trials = 300;
  cfg.calibration_path = "test_harness_sidecar.json";
  std::remove(cfg.calibration_path.c_str());
  const auto first = run_experiment(cfg);
  const auto second = run_experiment(cfg);
  CHECK(first.pass);
  CHECK(first.report["result"]["source"] == "calibrated");
  CHECK(second.report["result"]["source"] == "sidecar");
  CHECK(first.report["result"]["calibration"] == second.report["result"]["calibration"]);
  std::remove(cfg.calibration_path.c_str());
}

TEST_CASE("correct experiment on a small layout") {
  auto cfg = default_config();
  apply_preset(cfg, "T1");
  cfg.experiment = "correct";
  cfg.q_v = 3;
  cfg.trials = 200;
  const auto clean = run_experiment(cfg);
  CHECK(clean.pass);
  CHECK(clean.report["result"]["correct"] == 200);
  CHECK(clean.csv_rows.size() == 200);

  cfg.strategy = "garbage";
  cfg.region = "rm";
  cfg.target = 0.99;
  const auto garbage = run_experiment(cfg);
  CHECK(garbage.report["result"]["wrong"] == 0);
  CHECK(garbage.pass);

  cfg.strategy = "clean";
  cfg.region = "any";
  cfg.address = "31104";
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("far copies are caught by the copy they poison") {
  auto cfg = default_config();
  apply_preset(cfg, "T2");
  cfg.experiment = "correct";
  cfg.q_v = 3;
  cfg.trials = 600;
  cfg.region = "rm";
  cfg.bad_copies = Rational(1, 2);
  const auto r = run_experiment(cfg);
  const auto& c = r.report["result"]["copies"];
  const auto bad = c["bad_trials"].get<std::uint64_t>();
  CHECK(bad > 200);
  CHECK(bad < 400);
  CHECK(c["good_success"].get<double>() == 1.0);
  CHECK(c["good_aborted"].get<double>() == 0.0);
  CHECK(c["bad_aborted"].get<double>() > 0.9);
  CHECK(r.csv_header[4] == "bad_copy");
}

TEST_CASE("encode reports and dumps") {
  auto cfg = default_config();
  apply_preset(cfg, "T1");
  cfg.experiment = "encode";
  cfg.message = "1,2,3";
  cfg.point = "1,2";
  cfg.address = "17";
  cfg.dump_path = "test_harness_dump.txt";
  const auto r = run_experiment(cfg);
  CHECK(r.pass);
  CHECK(r.report["result"]["coefficients"].size() == 3);
  std::ifstream in(cfg.dump_path);
  std::uint64_t lines = 0, value = 0, at17 = 0;
  while (in >> value) {
    if (lines == 17) at17 = value;
    ++lines;
  }
  CHECK(lines == 31104);
  CHECK(at17 == r.report["result"]["symbol"].get<std::uint64_t>());
  std::remove(cfg.dump_path.c_str());
  cfg.message = "1,2";
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}
