#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "medlat/medlat.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool shifted = false;
  std::optional<unsigned> workers;
  std::string out;
  std::string approximant;
  std::string index_csv;
};

// Writes to --out, else the config's output path, else stdout.
template <class Fn>
void emit(const Options& opt, const medlat::ExperimentConfig& cfg, Fn&& write) {
  const std::string path = !opt.out.empty() ? opt.out : cfg.output.value_or("");
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw medlat::ConfigError("cannot open output file '" + path + "'");
  write(file);
}

medlat::ExperimentConfig load(const Options& opt) {
  auto cfg = medlat::load_config(opt.config);
  if (opt.shifted) cfg.shifted = true;
  if (opt.workers) {
    if (*opt.workers == 0) throw medlat::ConfigError("--workers must be >= 1");
    cfg.workers = *opt.workers;
  }
  return cfg;
}

int cmd_plan(const Options& opt) {
  const auto cfg = load(opt);
  const auto report = medlat::cmd_plan(cfg);
  emit(opt, cfg, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  if (!opt.index_csv.empty()) {
    const auto plan = medlat::build_plan(cfg.params(), cfg.tau, cfg.repetitions, medlat::single_modulus(cfg, "plan"));
    std::ofstream file(opt.index_csv);
    if (!file) throw medlat::ConfigError("cannot open '" + opt.index_csv + "'");
    medlat::write_index_set_csv(*plan.index_set, file);
  }
  return 0;
}

int cmd_run(const Options& opt) {
  const auto cfg = load(opt);
  const auto result = medlat::cmd_run(cfg, opt.seed);
  for (const auto& w : result.record.plan.warnings) std::cerr << "warning: " << w << '\n';
  emit(opt, cfg, [&](std::ostream& os) {
    medlat::write_csv_header(os, cfg.p_list);
    medlat::write_csv_row(os, result.record);
  });
  if (!opt.approximant.empty()) {
    std::ofstream file(opt.approximant);
    if (!file) throw medlat::ConfigError("cannot open '" + opt.approximant + "'");
    file << medlat::to_json(result.approximant).dump(2) << '\n';
  }
  return 0;
}

int cmd_sweep(const Options& opt) {
  auto cfg = load(opt);
  if (opt.seed) cfg.seeds = {*opt.seed};
  const auto sweep = medlat::cmd_sweep(cfg);
  emit(opt, cfg, [&](std::ostream& os) { medlat::write_sweep_csv(os, sweep, cfg.p_list); });
  if (!opt.out.empty() || cfg.output) std::cout << sweep.summary.dump(2) << '\n';
  return 0;
}

int cmd_failure_study(const Options& opt) {
  const auto cfg = load(opt);
  const auto study = medlat::cmd_failure_study(cfg);
  emit(opt, cfg, [&](std::ostream& os) { os << study.to_json().dump(2) << '\n'; });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Median lattice approximation in weighted Korobov spaces"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output path (default: config 'output' or stdout)");
    sub->add_option("--workers", opt.workers, "worker threads");
  };
  auto* plan = app.add_subcommand("plan", "print the plan: P_Nd, N2, |A|, cardinality bound, eps1, eps2");
  add_common(plan);
  plan->add_option("--index-csv", opt.index_csv, "write the index set as CSV (h_1..h_d, r_value)");

  auto* run = app.add_subcommand("run", "one run against the configured test function; CSV row");
  add_common(run);
  run->add_option("--seed", opt.seed, "master seed (overrides config)");
  run->add_flag("--shifted", opt.shifted, "use randomly shifted lattices");
  run->add_option("--approximant", opt.approximant, "write the approximant as JSON");

  auto* sweep = app.add_subcommand("sweep", "runs over a prime list and seeds; CSV table and fitted slopes");
  add_common(sweep);
  sweep->add_option("--seed", opt.seed, "single master seed (overrides config seeds)");
  sweep->add_flag("--shifted", opt.shifted, "use randomly shifted lattices");

  auto* failure = app.add_subcommand("failure-study", "empirical vs predicted failure probability");
  add_common(failure);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*plan) return cmd_plan(opt);
    if (*run) return cmd_run(opt);
    if (*sweep) return cmd_sweep(opt);
    return cmd_failure_study(opt);
  } catch (const medlat::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const medlat::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
