#include <gtest/gtest.h>

#include <sstream>

#include "medlat/experiment.hpp"

using namespace medlat;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string strip_wallclock(const std::string& csv) {
  // wallclock_ms is column 21 (index 20) with the default p list
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream cells(line);
    std::string cell;
    int i = 0;
    while (std::getline(cells, cell, ',')) {
      if (i++ != 20) out << cell << ',';
    }
    out << '\n';
  }
  return out.str();
}

const char* kPlanConfig = R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "tau": 1.0, "R": 3, "N": 97})";

}  // namespace

TEST(Config, ParsesFullConfig) {
  const auto cfg = parse_config(R"({
    "d": 2, "alpha": 1.5, "gamma": {"kind": "polynomial", "s": 2},
    "tau": 2.0, "R": 5, "N_list": [101, 31, 53, 97], "seeds": 3, "shifted": true,
    "test_function": {"kind": "product_decay", "s": 3, "theta": 0.75},
    "p_list": [3, 6], "grid": 64, "output": "out.csv", "workers": 2})");
  EXPECT_EQ(cfg.dim(), 2u);
  EXPECT_DOUBLE_EQ(cfg.gamma[1], 0.25);
  EXPECT_EQ(cfg.moduli, (std::vector<std::uint64_t>{31, 53, 97, 101}));
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_TRUE(cfg.shifted);
  EXPECT_EQ(cfg.test_function.decay, 3);
  EXPECT_EQ(cfg.p_list, (std::vector<double>{3, 6}));
  EXPECT_EQ(cfg.output, "out.csv");
  EXPECT_EQ(cfg.workers, 2u);
}

TEST(Config, Defaults) {
  const auto cfg = parse_config(kPlanConfig);
  EXPECT_EQ(cfg.test_function.kind, TestFunctionSpec::Kind::product_decay);
  EXPECT_EQ(cfg.test_function.decay, 2);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(parse_config(R"({"d": 1, "alpha": 2.0, "gamma": 1.0, "R": 3, "N": 97})").test_function.decay, 3);
}

TEST(Config, FieldDiagnostics) {
  EXPECT_NE(message_of(R"({"d": 1, "gamma": 1.0, "R": 3, "N": 97})").find("'alpha'"), std::string::npos);
  EXPECT_NE(message_of(R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "R": 4, "N": 97})").find("'R'"), std::string::npos);
  EXPECT_NE(message_of(R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "R": 3, "N": 91})").find("not an odd prime"), std::string::npos);
  EXPECT_NE(message_of(R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "R": 3, "N_list": []})").find("'N_list'"), std::string::npos);
  EXPECT_NE(message_of(R"({"d": 2, "alpha": 1.0, "gamma": [1.0], "R": 3, "N": 97})").find("'gamma'"), std::string::npos);
  EXPECT_NE(message_of(R"({"d": 1, "alpha": 1.0, "gamma": {"kind": "odd"}, "R": 3, "N": 97})").find("gamma.kind"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"d": 1, "alpha": 1.0, "gamma": 2.0, "R": 3, "N": 97})").find("'gamma'"), std::string::npos);
  EXPECT_NE(message_of(R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "R": 3, "N": 97, "p_list": [2]})").find("p_list"),
            std::string::npos);
  EXPECT_NE(message_of("{\n  \"d\": 1,\n  \"alpha\": 1.0\n  \"R\": 3\n}").find("line 4"), std::string::npos);
}

TEST(Commands, PlanReport) {
  const auto report = cmd_plan(parse_config(kPlanConfig));
  EXPECT_NEAR(report["N2"].get<double>(), 2.9067, 2e-4);
  EXPECT_EQ(report["card_A"], 5);
  EXPECT_NEAR(report["eps1"].get<double>(), 9.36, 0.01);
  EXPECT_NEAR(report["cardinality_bound"].get<double>(), 47.44, 0.01);
  EXPECT_EQ(report["guarantee"], "no guarantee");
}

TEST(Commands, IndexSetCsv) {
  const auto plan = build_plan(KorobovParams(1.0, WeightSequence::from_list({1.0})), 1.0, 3, 97);
  std::ostringstream out;
  write_index_set_csv(*plan.index_set, out);
  EXPECT_EQ(out.str(), "h_1,r_value\n-2,4\n-1,1\n0,1\n1,1\n2,4\n");
}

TEST(Commands, RunReconstructsSparse) {
  auto cfg = parse_config(R"({"d": 2, "alpha": 1.0, "gamma": [1.0, 0.5], "R": 5, "N": 1009,
    "test_function": {"kind": "sparse", "terms": [{"h": [0, 0], "re": 1.0}, {"h": [1, 0], "re": 0.5, "im": -0.25}]},
    "grid": 32})");
  int qualifying = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto result = cmd_run(cfg, seed);
    ASSERT_TRUE(result.record.event.has_value());
    if (!result.record.event->coefficient_majority) continue;
    ++qualifying;
    EXPECT_LE(result.record.errors.l2, 1e-10);
  }
  EXPECT_GT(qualifying, 0);
}

TEST(Commands, RunCsvIsDeterministic) {
  auto cfg = parse_config(R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "R": 5, "N": 251, "seed": 9})");
  auto csv = [&](bool shifted) {
    std::ostringstream out;
    write_csv_header(out, cfg.p_list);
    write_csv_row(out, cmd_run(cfg, std::nullopt, shifted).record);
    return out.str();
  };
  const auto a = csv(false);
  EXPECT_EQ(strip_wallclock(a), strip_wallclock(csv(false)));
  const auto b = csv(true);
  EXPECT_NE(strip_wallclock(a), strip_wallclock(b));
  EXPECT_NE(a.find("\n251,"), std::string::npos);
  EXPECT_NE(b.find(",9,1,"), std::string::npos);  // seed, shifted
  EXPECT_NE(a.find(",9,0,"), std::string::npos);
  EXPECT_EQ(csv_columns(cfg.p_list)[20], "wallclock_ms");
}

TEST(Commands, SyntheticSweepSlope) {
  for (double alpha : {1.0, 1.5, 2.0}) {
    const auto cfg = parse_config(R"({"d": 1, "alpha": )" + std::to_string(alpha) +
                                  R"(, "gamma": 1.0, "R": 3, "N_list": [31, 53, 97, 157, 251, 397], "seeds": 2, "synthetic": true})");
    const auto sweep = cmd_sweep(cfg, 2u);
    ASSERT_TRUE(sweep.slopes.at("l2").has_value());
    EXPECT_NEAR(sweep.slopes.at("l2")->slope, -alpha, 1e-6);
    EXPECT_NEAR(sweep.slopes.at("linf_grid")->slope, -alpha, 1e-6);
    EXPECT_EQ(sweep.excluded_moduli, (std::vector<std::uint64_t>{31, 53}));
    EXPECT_EQ(sweep.rows.size(), 12u);
  }
}

TEST(Commands, SweepOrderIndependentOfWorkers) {
  auto cfg = parse_config(R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "R": 3, "N_list": [53, 31, 97, 157],
    "seeds": [4, 1], "grid": 256})");
  const auto one = cmd_sweep(cfg, 1u);
  const auto many = cmd_sweep(cfg, 3u);
  ASSERT_EQ(one.rows.size(), many.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    EXPECT_EQ(one.rows[i].plan.modulus, many.rows[i].plan.modulus);
    EXPECT_EQ(one.rows[i].seed, many.rows[i].seed);
    EXPECT_EQ(one.rows[i].errors.l2, many.rows[i].errors.l2);
  }
  EXPECT_EQ(one.rows.front().plan.modulus, 31u);
  EXPECT_EQ(one.rows.front().seed, 1u);
  std::ostringstream csv;
  write_sweep_csv(csv, one, cfg.p_list);
  EXPECT_EQ(csv.str().rfind("# rate fit excludes", 0), 0u);
}

TEST(Commands, SweepNeedsFourPrimes) {
  EXPECT_THROW(cmd_sweep(parse_config(R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "R": 3, "N_list": [31, 53, 97]})")),
               ConfigError);
}

TEST(Commands, FailureStudyExhaustive) {
  const auto study = cmd_failure_study(parse_config(R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "R": 3, "N": 5})"));
  EXPECT_EQ(study.mode, "exhaustive");
  EXPECT_EQ(study.trials, 64u);
  EXPECT_EQ(study.empirical, 0.0);
  EXPECT_TRUE(study.within_bound);
}

TEST(Commands, FailureStudyPlanSearch) {
  const auto study = cmd_failure_study(parse_config(R"({"d": 2, "alpha": 1.0, "gamma": [1.0, 0.5],
    "plan_search": {"eps_target": 0.2}, "trials": 500, "mode": "monte_carlo"})"));
  EXPECT_LE(study.plan.eps2, 0.2);
  EXPECT_EQ(study.trials, 500u);
  EXPECT_LE(study.empirical, study.plan.eps2 + 3.0 * std::sqrt(study.plan.eps2 * (1 - study.plan.eps2) / 500.0));
}

TEST(Commands, FailureStudyLimits) {
  EXPECT_THROW(cmd_failure_study(parse_config(R"({"d": 2, "alpha": 1.0, "gamma": 1.0, "R": 5, "N": 101, "mode": "exhaustive"})")),
               BudgetExceeded);
  EXPECT_THROW(cmd_failure_study(parse_config(R"({"d": 1, "alpha": 1.0, "gamma": 1.0, "R": 3, "N": 97, "mode": "monte_carlo", "trials": 20})")),
               ConfigError);
}
