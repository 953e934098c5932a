#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "medlat/algorithm.hpp"
#include "medlat/error_lab.hpp"
#include "medlat/errors.hpp"
#include "medlat/primes.hpp"
#include "medlat/serialize.hpp"
#include "medlat/test_function.hpp"

namespace medlat {

struct TestFunctionSpec {
  enum class Kind { product_decay, sparse } kind = Kind::product_decay;
  int decay = 0;  // 0: smallest integer above alpha + 1/2
  double theta = 1.0;
  Spectrum terms;
  bool normalize = true;
};

struct PlanSearchSpec {
  double eps_target = 0.2;
  std::vector<double> taus{1.0, 2.0, 4.0, 8.0};
  std::size_t max_repetitions = 51;
  std::uint64_t min_modulus = 101;
  std::uint64_t max_modulus = 200'000;
};

struct ExperimentConfig {
  double alpha = 1.0;
  WeightSequence gamma = WeightSequence::from_list({1.0});
  double tau = kDefaultTau;
  std::size_t repetitions = 0;
  std::vector<std::uint64_t> moduli;
  std::vector<std::uint64_t> seeds{0};
  bool shifted = false;
  TestFunctionSpec test_function;
  std::vector<double> p_list{3.0, 4.0, 8.0};
  std::uint64_t grid = 0;
  std::optional<std::string> output;
  bool synthetic = false;
  unsigned workers = 1;
  std::size_t trials = 500;
  std::string mode = "auto";
  std::optional<PlanSearchSpec> plan_search;

  KorobovParams params() const { return KorobovParams(alpha, gamma); }
  std::size_t dim() const { return gamma.size(); }
};

namespace detail {

[[noreturn]] inline void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

inline const Json* find_field(const Json& j, const char* name) {
  auto it = j.find(name);
  return it == j.end() ? nullptr : &*it;
}

inline double number_field(const Json& v, const std::string& name) {
  if (!v.is_number()) field_error(name, "expected a number");
  return v.get<double>();
}

inline std::uint64_t unsigned_field(const Json& v, const std::string& name) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    field_error(name, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

inline std::vector<std::uint64_t> unsigned_list(const Json& v, const std::string& name) {
  if (!v.is_array()) field_error(name, "expected an array of integers");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(unsigned_field(v[i], name + "[" + std::to_string(i) + "]"));
  return out;
}

inline WeightSequence parse_gamma(const Json& v, std::size_t d) {
  try {
    if (v.is_number()) return WeightSequence::from_list(std::vector<double>(d, v.get<double>()));
    if (v.is_array()) {
      auto values = v.get<std::vector<double>>();
      if (values.size() != d) field_error("gamma", "expected " + std::to_string(d) + " values");
      return WeightSequence::from_list(std::move(values));
    }
    if (!v.is_object()) field_error("gamma", "expected an object {kind, values|s|c}");
    const Json* kind = find_field(v, "kind");
    if (!kind || !kind->is_string()) field_error("gamma.kind", "missing (explicit, polynomial or geometric)");
    const auto k = kind->get<std::string>();
    if (k == "explicit") {
      const Json* values = find_field(v, "values");
      if (!values || !values->is_array()) field_error("gamma.values", "missing array");
      auto list = values->get<std::vector<double>>();
      if (list.size() != d) field_error("gamma.values", "expected " + std::to_string(d) + " values");
      return WeightSequence::from_list(std::move(list));
    }
    if (k == "polynomial") {
      const Json* s = find_field(v, "s");
      if (!s) field_error("gamma.s", "missing");
      return WeightSequence::polynomial(number_field(*s, "gamma.s"), d);
    }
    if (k == "geometric") {
      const Json* c = find_field(v, "c");
      if (!c) field_error("gamma.c", "missing");
      return WeightSequence::geometric(number_field(*c, "gamma.c"), d);
    }
    field_error("gamma.kind", "unknown kind '" + k + "'");
  } catch (const Json::exception& e) {
    field_error("gamma", e.what());
  } catch (const std::invalid_argument& e) {
    field_error("gamma", e.what());
  }
}

inline TestFunctionSpec parse_test_function(const Json& v, std::size_t d) {
  TestFunctionSpec spec;
  if (!v.is_object()) field_error("test_function", "expected an object");
  const Json* kind = find_field(v, "kind");
  const std::string k = kind && kind->is_string() ? kind->get<std::string>() : "";
  if (k == "product_decay") {
    spec.kind = TestFunctionSpec::Kind::product_decay;
    if (const Json* s = find_field(v, "s")) {
      if (!s->is_number_integer() || s->get<std::int64_t>() < 2) field_error("test_function.s", "expected an integer >= 2");
      spec.decay = s->get<int>();
    }
    if (const Json* t = find_field(v, "theta")) spec.theta = number_field(*t, "test_function.theta");
    return spec;
  }
  if (k == "sparse") {
    spec.kind = TestFunctionSpec::Kind::sparse;
    const Json* terms = find_field(v, "terms");
    if (!terms || !terms->is_array() || terms->empty()) field_error("test_function.terms", "expected a non-empty array");
    for (std::size_t i = 0; i < terms->size(); ++i) {
      const auto name = "test_function.terms[" + std::to_string(i) + "]";
      const auto& t = (*terms)[i];
      const Json* h = t.is_object() ? find_field(t, "h") : nullptr;
      if (!h || !h->is_array() || h->size() != d) field_error(name + ".h", "expected " + std::to_string(d) + " integers");
      std::vector<std::int64_t> hv;
      for (const auto& x : *h) {
        if (!x.is_number_integer()) field_error(name + ".h", "expected integers");
        hv.push_back(x.get<std::int64_t>());
      }
      const Json* re = find_field(t, "re");
      const Json* im = find_field(t, "im");
      spec.terms[FrequencyVector(std::move(hv))] += Complex(re ? number_field(*re, name + ".re") : 0.0,
                                                            im ? number_field(*im, name + ".im") : 0.0);
    }
    if (const Json* n = find_field(v, "normalize")) {
      if (!n->is_boolean()) field_error("test_function.normalize", "expected a boolean");
      spec.normalize = n->get<bool>();
    }
    return spec;
  }
  field_error("test_function.kind", "expected 'product_decay' or 'sparse'");
}

inline PlanSearchSpec parse_plan_search(const Json& v) {
  if (!v.is_object()) field_error("plan_search", "expected an object");
  PlanSearchSpec spec;
  if (const Json* e = find_field(v, "eps_target")) spec.eps_target = number_field(*e, "plan_search.eps_target");
  if (const Json* t = find_field(v, "tau_list")) {
    if (!t->is_array() || t->empty()) field_error("plan_search.tau_list", "expected a non-empty array");
    spec.taus.clear();
    for (const auto& x : *t) spec.taus.push_back(number_field(x, "plan_search.tau_list"));
  }
  if (const Json* r = find_field(v, "R_max")) spec.max_repetitions = unsigned_field(*r, "plan_search.R_max");
  if (const Json* n = find_field(v, "N_min")) spec.min_modulus = unsigned_field(*n, "plan_search.N_min");
  if (const Json* n = find_field(v, "N_max")) spec.max_modulus = unsigned_field(*n, "plan_search.N_max");
  if (!(spec.eps_target > 0.0 && spec.eps_target <= 1.0)) field_error("plan_search.eps_target", "must lie in (0, 1]");
  if (spec.min_modulus < 3 || spec.max_modulus < spec.min_modulus) field_error("plan_search.N_max", "empty modulus range");
  return spec;
}

}  // namespace detail

/// Parses and validates a JSON config. Errors name the offending field or,
/// for malformed JSON, the line and column.
inline ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  using detail::field_error;
  using detail::find_field;

  ExperimentConfig cfg;
  const Json* d = find_field(j, "d");
  if (!d) field_error("d", "missing");
  const auto dim = detail::unsigned_field(*d, "d");
  if (dim < 1) field_error("d", "must be >= 1");

  const Json* alpha = find_field(j, "alpha");
  if (!alpha) field_error("alpha", "missing");
  cfg.alpha = detail::number_field(*alpha, "alpha");
  if (!(cfg.alpha > 0.5)) field_error("alpha", "must exceed 1/2");

  const Json* gamma = find_field(j, "gamma");
  if (!gamma) field_error("gamma", "missing");
  cfg.gamma = detail::parse_gamma(*gamma, dim);

  if (const Json* tau = find_field(j, "tau")) {
    cfg.tau = detail::number_field(*tau, "tau");
    if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) field_error("tau", "must be positive");
  }

  if (const Json* ps = find_field(j, "plan_search")) cfg.plan_search = detail::parse_plan_search(*ps);

  if (const Json* r = find_field(j, "R")) {
    cfg.repetitions = detail::unsigned_field(*r, "R");
    if (cfg.repetitions < 3 || cfg.repetitions % 2 == 0) field_error("R", "must be an odd integer > 1");
  } else if (!cfg.plan_search) {
    field_error("R", "missing");
  }

  const Json* n = find_field(j, "N");
  const Json* n_list = find_field(j, "N_list");
  if (n && n_list) field_error("N", "give either N or N_list, not both");
  if (n) cfg.moduli = {detail::unsigned_field(*n, "N")};
  if (n_list) {
    cfg.moduli = detail::unsigned_list(*n_list, "N_list");
    if (cfg.moduli.empty()) field_error("N_list", "empty prime list");
  }
  if (!n && !n_list && !cfg.plan_search) field_error("N", "missing (N or N_list)");
  for (auto m : cfg.moduli)
    if (m < 3 || m % 2 == 0 || !is_prime(m)) field_error(n ? "N" : "N_list", std::to_string(m) + " is not an odd prime");
  std::sort(cfg.moduli.begin(), cfg.moduli.end());
  if (std::adjacent_find(cfg.moduli.begin(), cfg.moduli.end()) != cfg.moduli.end()) field_error("N_list", "duplicate prime");

  const Json* seed = find_field(j, "seed");
  const Json* seeds = find_field(j, "seeds");
  if (seed && seeds) field_error("seed", "give either seed or seeds, not both");
  if (seed) cfg.seeds = {detail::unsigned_field(*seed, "seed")};
  if (seeds) {
    if (seeds->is_number_integer()) {
      const auto count = detail::unsigned_field(*seeds, "seeds");
      if (count == 0) field_error("seeds", "must be positive");
      cfg.seeds.clear();
      for (std::uint64_t s = 0; s < count; ++s) cfg.seeds.push_back(s);
    } else {
      cfg.seeds = detail::unsigned_list(*seeds, "seeds");
      if (cfg.seeds.empty()) field_error("seeds", "empty seed list");
    }
  }

  if (const Json* s = find_field(j, "shifted")) {
    if (!s->is_boolean()) field_error("shifted", "expected a boolean");
    cfg.shifted = s->get<bool>();
  }
  if (const Json* tf = find_field(j, "test_function")) cfg.test_function = detail::parse_test_function(*tf, dim);
  if (cfg.test_function.kind == TestFunctionSpec::Kind::product_decay) {
    if (cfg.test_function.decay == 0) cfg.test_function.decay = int(std::floor(cfg.alpha + 0.5)) + 1;
    if (!(cfg.test_function.decay > cfg.alpha + 0.5)) field_error("test_function.s", "must exceed alpha + 1/2");
    if (!(cfg.test_function.theta >= 0.5)) field_error("test_function.theta", "must be >= 1/2");
  }
  if (const Json* p = find_field(j, "p_list")) {
    if (!p->is_array()) field_error("p_list", "expected an array");
    cfg.p_list.clear();
    for (const auto& x : *p) {
      const double v = detail::number_field(x, "p_list");
      if (!(v > 2.0) || std::isinf(v)) field_error("p_list", "entries must be finite and > 2");
      cfg.p_list.push_back(v);
    }
  }
  if (const Json* g = find_field(j, "grid")) cfg.grid = detail::unsigned_field(*g, "grid");
  if (const Json* o = find_field(j, "output")) {
    if (!o->is_string()) field_error("output", "expected a path string");
    cfg.output = o->get<std::string>();
  }
  if (const Json* s = find_field(j, "synthetic")) {
    if (!s->is_boolean()) field_error("synthetic", "expected a boolean");
    cfg.synthetic = s->get<bool>();
  }
  if (const Json* w = find_field(j, "workers")) {
    cfg.workers = unsigned(detail::unsigned_field(*w, "workers"));
    if (cfg.workers == 0) field_error("workers", "must be >= 1");
  }
  if (const Json* t = find_field(j, "trials")) cfg.trials = detail::unsigned_field(*t, "trials");
  if (const Json* m = find_field(j, "mode")) {
    if (!m->is_string()) field_error("mode", "expected a string");
    cfg.mode = m->get<std::string>();
    if (cfg.mode != "auto" && cfg.mode != "exhaustive" && cfg.mode != "monte_carlo")
      field_error("mode", "expected auto, exhaustive or monte_carlo");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

inline TestFunction make_test_function(const ExperimentConfig& cfg) {
  const auto params = cfg.params();
  if (cfg.test_function.kind == TestFunctionSpec::Kind::sparse)
    return TestFunction::sparse(cfg.test_function.terms, params, cfg.test_function.normalize);
  return TestFunction::product_decay(params, cfg.test_function.decay, cfg.test_function.theta);
}

inline std::uint64_t single_modulus(const ExperimentConfig& cfg, const char* command) {
  if (cfg.moduli.size() != 1) throw ConfigError(std::string(command) + ": config must give a single N");
  return cfg.moduli.front();
}

// ---------------------------------------------------------------- plan

inline Json plan_report(const AlgorithmPlan& plan) {
  Json j = to_json(plan);
  j["guarantee"] = plan.guaranteed ? "guaranteed" : "no guarantee";
  return j;
}

inline Json cmd_plan(const ExperimentConfig& cfg) {
  if (cfg.repetitions == 0) throw ConfigError("plan: config field 'R' missing");
  if (cfg.moduli.empty()) throw ConfigError("plan: config field 'N' missing");
  const auto params = cfg.params();
  if (cfg.moduli.size() == 1) return plan_report(build_plan(params, cfg.tau, cfg.repetitions, cfg.moduli.front()));
  Json out = Json::array();
  for (auto m : cfg.moduli) out.push_back(plan_report(build_plan(params, cfg.tau, cfg.repetitions, m)));
  return out;
}

/// One row per member: h_1..h_d, r_value.
inline void write_index_set_csv(const FrequencyIndexSet& set, std::ostream& out) {
  for (std::size_t j = 0; j < set.dim(); ++j) out << "h_" << (j + 1) << ',';
  out << "r_value\n";
  char buf[32];
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (auto v : set[i]) out << v << ',';
    std::snprintf(buf, sizeof buf, "%.17g", set.r_values()[i]);
    out << buf << '\n';
  }
}

// ---------------------------------------------------------------- runs and CSV

struct RunRecord {
  AlgorithmPlan plan;
  std::uint64_t seed = 0;
  bool shifted = false;
  ErrorReport errors;
  std::uint64_t evaluations = 0;
  double wallclock_ms = 0.0;
  std::optional<LatticeEvent> event;  // absent in synthetic mode
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

}  // namespace detail

inline std::vector<std::string> csv_columns(std::span<const double> p_list) {
  std::vector<std::string> cols{"N", "N2", "card_A", "R", "tau", "seed", "shifted", "l2", "linf_upper", "linf_grid", "l2_grid"};
  for (double p : p_list) {
    cols.push_back("lp" + detail::fmt_p(p) + "_interp");
    cols.push_back("lp" + detail::fmt_p(p) + "_grid");
  }
  for (const char* c : {"eps1", "eps2", "evals", "wallclock_ms", "d", "alpha", "gamma", "P_Nd", "guaranteed",
                        "coef_event", "fom_event"})
    cols.emplace_back(c);
  return cols;
}

inline void write_csv_header(std::ostream& out, std::span<const double> p_list) {
  const auto cols = csv_columns(p_list);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

/// One CSV line. The wallclock column is the only non-deterministic field.
inline void write_csv_row(std::ostream& out, const RunRecord& rec) {
  using detail::fmt;
  const auto& p = rec.plan;
  out << p.modulus << ',' << fmt(p.n2) << ',' << p.index_set->size() << ',' << p.repetitions << ',' << fmt(p.tau) << ','
      << rec.seed << ',' << (rec.shifted ? 1 : 0) << ',' << fmt(rec.errors.l2) << ',' << fmt(rec.errors.linf_upper) << ','
      << fmt(rec.errors.linf_grid) << ',' << fmt(rec.errors.l2_grid);
  for (const auto& e : rec.errors.lp) out << ',' << fmt(e.interpolated) << ',' << fmt(e.grid);
  out << ',' << fmt(p.eps1) << ',' << fmt(p.eps2) << ',' << rec.evaluations << ',' << fmt(rec.wallclock_ms) << ','
      << p.dim() << ',' << fmt(p.params.alpha()) << ',';
  for (std::size_t j = 0; j < p.dim(); ++j) out << (j ? ";" : "") << fmt(p.params.gamma(j));
  out << ',' << fmt(p.p_nd) << ',' << (p.guaranteed ? 1 : 0) << ',';
  if (rec.event) out << (rec.event->coefficient_majority ? 1 : 0) << ',' << (rec.event->figure_of_merit_majority ? 1 : 0);
  else out << "NA,NA";
  out << '\n';
}

struct RunResult {
  RunRecord record;
  Approximant approximant;
};

inline RunResult run_once(const AlgorithmPlan& plan, const TestFunction& f, const ExperimentConfig& cfg,
                          std::uint64_t seed, bool shifted, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  auto approx = run(f, plan, seed, RunOptions{shifted, workers});
  RunRecord rec{plan, seed, shifted, measure_errors(approx, f, cfg.p_list, cfg.grid), approx.evaluations, 0.0, std::nullopt};
  const auto rules = approx.rules();
  rec.event = lattice_event(plan, rules);
  rec.wallclock_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return {std::move(rec), std::move(approx)};
}

inline RunResult cmd_run(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed = std::nullopt,
                         std::optional<bool> shifted = std::nullopt) {
  if (cfg.repetitions == 0) throw ConfigError("run: config field 'R' missing");
  const auto plan = build_plan(cfg.params(), cfg.tau, cfg.repetitions, single_modulus(cfg, "run"));
  const auto f = make_test_function(cfg);
  return run_once(plan, f, cfg, seed.value_or(cfg.seeds.front()), shifted.value_or(cfg.shifted), cfg.workers);
}

// ---------------------------------------------------------------- sweep

struct SweepResult {
  std::vector<RunRecord> rows;  // sorted by (N, seed)
  std::vector<std::uint64_t> fitted_moduli;
  std::vector<std::uint64_t> excluded_moduli;
  std::map<std::string, std::vector<double>> medians;  // column -> median per N (all N)
  std::map<std::string, std::optional<RateFit>> slopes;
  Json summary;
};

inline constexpr std::size_t kExcludedSmallPrimes = 2;
inline constexpr std::size_t kMinSweepPrimes = 4;

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::vector<std::pair<std::string, double>> metric_values(const RunRecord& rec) {
  std::vector<std::pair<std::string, double>> out{{"l2", rec.errors.l2},
                                                  {"linf_upper", rec.errors.linf_upper},
                                                  {"linf_grid", rec.errors.linf_grid},
                                                  {"l2_grid", rec.errors.l2_grid}};
  for (const auto& e : rec.errors.lp) {
    out.emplace_back("lp" + fmt_p(e.p) + "_interp", e.interpolated);
    out.emplace_back("lp" + fmt_p(e.p) + "_grid", e.grid);
  }
  return out;
}

inline RunRecord synthetic_record(const AlgorithmPlan& plan, const ExperimentConfig& cfg, std::uint64_t seed) {
  const double e = std::pow(double(plan.modulus), -cfg.alpha);
  ErrorReport rep{e, e, e, e, {}};
  for (double p : cfg.p_list) rep.lp.push_back({p, e, e});
  return RunRecord{plan, seed, cfg.shifted, rep, plan.total_evaluations, 0.0, std::nullopt};
}

}  // namespace detail

/// Runs every (N, seed) pair, then fits log-log slopes of the median error per N.
/// The smallest primes are left out of the fit while at least four remain.
inline SweepResult cmd_sweep(const ExperimentConfig& cfg, std::optional<unsigned> workers = std::nullopt) {
  if (cfg.repetitions == 0) throw ConfigError("sweep: config field 'R' missing");
  if (cfg.moduli.size() < kMinSweepPrimes)
    throw ConfigError("config field 'N_list': sweep needs at least " + std::to_string(kMinSweepPrimes) + " primes");
  const auto params = cfg.params();
  const auto f = cfg.synthetic ? TestFunction::sparse({{FrequencyVector(cfg.dim()), 1.0}}, params)
                               : make_test_function(cfg);

  std::vector<AlgorithmPlan> plans;
  for (auto m : cfg.moduli) plans.push_back(build_plan(params, cfg.tau, cfg.repetitions, m));

  struct Job {
    std::size_t plan_index;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < plans.size(); ++i)
    for (auto s : cfg.seeds) jobs.push_back({i, s});
  std::sort(jobs.begin(), jobs.end(), [&](const Job& a, const Job& b) {
    return std::pair(plans[a.plan_index].modulus, a.seed) < std::pair(plans[b.plan_index].modulus, b.seed);
  });

  std::vector<std::optional<RunRecord>> slots(jobs.size());
  auto work = [&](std::size_t i) {
    const auto& job = jobs[i];
    slots[i] = cfg.synthetic ? detail::synthetic_record(plans[job.plan_index], cfg, job.seed)
                             : run_once(plans[job.plan_index], f, cfg, job.seed, cfg.shifted, 1).record;
  };
  const unsigned pool_size = std::max(1u, std::min<unsigned>(workers.value_or(cfg.workers), unsigned(jobs.size())));
  if (pool_size == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
  } else {
    std::mutex next_mutex;
    std::size_t next = 0;
    std::vector<std::exception_ptr> errors(pool_size);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < pool_size; ++w)
      pool.emplace_back([&, w] {
        try {
          for (;;) {
            std::size_t i;
            {
              std::lock_guard lock(next_mutex);
              if (next == jobs.size()) return;
              i = next++;
            }
            work(i);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SweepResult out;
  for (auto& s : slots) out.rows.push_back(std::move(*s));

  const std::size_t excluded = std::min(kExcludedSmallPrimes, cfg.moduli.size() - kMinSweepPrimes);
  out.excluded_moduli.assign(cfg.moduli.begin(), cfg.moduli.begin() + std::ptrdiff_t(excluded));
  out.fitted_moduli.assign(cfg.moduli.begin() + std::ptrdiff_t(excluded), cfg.moduli.end());

  std::map<std::string, std::vector<std::vector<double>>> per_n;
  for (const auto& rec : out.rows) {
    const auto idx = std::size_t(std::lower_bound(cfg.moduli.begin(), cfg.moduli.end(), rec.plan.modulus) - cfg.moduli.begin());
    for (const auto& [name, v] : detail::metric_values(rec)) {
      auto& bucket = per_n[name];
      bucket.resize(cfg.moduli.size());
      bucket[idx].push_back(v);
    }
  }
  Json slopes = Json::object();
  for (const auto& [name, buckets] : per_n) {
    auto& med = out.medians[name];
    for (const auto& b : buckets) med.push_back(detail::median_of(b));
    std::vector<std::pair<double, double>> points;
    bool positive = true;
    for (std::size_t i = excluded; i < cfg.moduli.size(); ++i) {
      positive = positive && med[i] > 0.0;
      points.emplace_back(double(cfg.moduli[i]), med[i]);
    }
    if (positive) {
      const auto fit = fit_rate(points);
      out.slopes[name] = fit;
      slopes[name] = {{"slope", fit.slope}, {"r_squared", fit.r_squared}};
    } else {
      out.slopes[name] = std::nullopt;
      slopes[name] = nullptr;
    }
  }

  Json medians = Json::object();
  for (const auto& [name, v] : out.medians) medians[name] = v;
  out.summary = Json{{"N_list", cfg.moduli},
                     {"seeds", cfg.seeds},
                     {"fit_moduli", out.fitted_moduli},
                     {"excluded_moduli", out.excluded_moduli},
                     {"synthetic", cfg.synthetic},
                     {"shifted", cfg.shifted},
                     {"test_function", f.description()},
                     {"medians", medians},
                     {"slopes", slopes}};
  return out;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& sweep, std::span<const double> p_list) {
  out << "# rate fit excludes the smallest primes:";
  for (auto m : sweep.excluded_moduli) out << ' ' << m;
  out << "\n# rate fit uses:";
  for (auto m : sweep.fitted_moduli) out << ' ' << m;
  out << '\n';
  for (const auto& [name, fit] : sweep.slopes) {
    out << "# slope " << name << ' ';
    if (fit) out << detail::fmt(fit->slope) << " r2 " << detail::fmt(fit->r_squared) << '\n';
    else out << "NA\n";
  }
  write_csv_header(out, p_list);
  for (const auto& rec : sweep.rows) write_csv_row(out, rec);
}

// ---------------------------------------------------------------- failure study

inline constexpr std::uint64_t kExhaustiveBudget = 1'000'000;
inline constexpr std::uint64_t kMonteCarloBudget = 2'000'000'000;
inline constexpr std::size_t kMinTrials = 500;

/// Cheapest plan (by R N) with eps2 <= target over a geometric grid of primes.
inline std::optional<AlgorithmPlan> search_plan(const KorobovParams& params, const PlanSearchSpec& spec) {
  std::optional<AlgorithmPlan> best;
  for (double tau : spec.taus) {
    for (double target = double(spec.min_modulus); target <= double(spec.max_modulus); target *= 1.15) {
      const auto modulus = next_prime(std::uint64_t(target) | 1);
      if (modulus > spec.max_modulus) break;
      if (best && 3 * modulus >= best->repetitions * best->modulus) break;
      const auto probe = build_plan(params, tau, 3, modulus);
      if (!(probe.n2 > 1.0)) continue;
      const double base = 8.0 / (1.0 + tau * plan_log(probe.n2));
      if (!(base < 1.0)) continue;
      const double majority = std::ceil(std::log(2.0 * spec.eps_target / double(probe.index_set->size())) / std::log(base));
      const std::size_t reps = std::max<std::size_t>(3, 2 * std::size_t(std::max(1.0, majority)) - 1);
      if (reps > spec.max_repetitions) continue;
      auto plan = build_plan(params, tau, reps, modulus);
      if (!(plan.eps2 <= spec.eps_target)) continue;
      if (!best || plan.repetitions * plan.modulus < best->repetitions * best->modulus) best = std::move(plan);
    }
  }
  return best;
}

struct FailureStudy {
  AlgorithmPlan plan;
  std::string mode;             // exhaustive or monte_carlo
  std::uint64_t trials = 0;     // R-tuples enumerated or seeds drawn
  std::uint64_t fom_failures = 0;   // figure-of-merit majority event fails
  std::uint64_t coef_failures = 0;  // per-coefficient majority event fails
  double empirical = 0.0;           // fom_failures / trials
  double empirical_coef = 0.0;
  double sigma = 0.0;               // sqrt(eps2 (1 - eps2) / trials); 0 when exhaustive
  double half_width = 0.0;          // 3 sigma
  bool within_bound = false;        // empirical <= eps2 + half_width

  Json to_json() const {
    Json j = plan_report(plan);
    j["mode"] = mode;
    j["trials"] = trials;
    j["fom_failures"] = fom_failures;
    j["coef_failures"] = coef_failures;
    j["empirical_failure"] = empirical;
    j["empirical_coef_failure"] = empirical_coef;
    j["sigma"] = sigma;
    j["half_width"] = half_width;
    j["within_bound"] = within_bound;
    return j;
  }
};

namespace detail {

inline std::uint64_t saturating_power(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

// Per-generator alias-free masks, enumerated once and reused across R-tuples.
inline FailureStudy exhaustive_study(const AlgorithmPlan& plan) {
  const auto& set = *plan.index_set;
  const std::size_t d = plan.dim();
  const std::uint64_t per_coord = plan.modulus - 1;
  const std::uint64_t generators = saturating_power(per_coord, d, kExhaustiveBudget);
  const std::uint64_t tuples = saturating_power(generators, plan.repetitions, kExhaustiveBudget);
  if (tuples > kExhaustiveBudget)
    throw BudgetExceeded("failure study: (N-1)^(dR) exceeds the exhaustive budget of " + std::to_string(kExhaustiveBudget));

  std::vector<std::vector<bool>> masks;
  std::vector<bool> rho_ok;
  for (std::uint64_t g = 0; g < generators; ++g) {
    std::vector<std::int64_t> z(d);
    std::uint64_t rest = g;
    for (std::size_t j = 0; j < d; ++j) {
      z[j] = std::int64_t(1 + rest % per_coord);
      rest /= per_coord;
    }
    const LatticeRule rule(plan.modulus, z);
    masks.push_back(alias_free_set(rule, set).mask);
    rho_ok.push_back(rho_at_least(rule, set));
  }

  FailureStudy out{plan, "exhaustive", tuples};
  std::vector<std::size_t> all(set.size()), good(set.size());
  std::vector<std::uint64_t> pick(plan.repetitions);
  for (std::uint64_t t = 0; t < tuples; ++t) {
    std::uint64_t rest = t;
    for (auto& p : pick) {
      p = rest % generators;
      rest /= generators;
    }
    std::fill(all.begin(), all.end(), 0);
    std::fill(good.begin(), good.end(), 0);
    for (auto p : pick)
      for (std::size_t i = 0; i < set.size(); ++i)
        if (masks[p][i]) {
          ++all[i];
          if (rho_ok[p]) ++good[i];
        }
    const auto majority = plan.majority();
    bool coef = true, fom = true;
    for (std::size_t i = 0; i < set.size(); ++i) {
      coef = coef && all[i] >= majority;
      fom = fom && good[i] >= majority;
    }
    if (set.empty()) {
      std::size_t good_rules = 0;
      for (auto p : pick) good_rules += rho_ok[p] ? 1 : 0;
      fom = good_rules >= majority;
    }
    out.coef_failures += coef ? 0 : 1;
    out.fom_failures += fom ? 0 : 1;
  }
  return out;
}

inline FailureStudy monte_carlo_study(const AlgorithmPlan& plan, std::size_t trials) {
  if (trials < kMinTrials)
    throw ConfigError("config field 'trials': Monte Carlo needs at least " + std::to_string(kMinTrials) + " seeds");
  const double work = double(trials) * double(plan.repetitions) * double(plan.index_set->size() + 1);
  if (work > double(kMonteCarloBudget)) throw BudgetExceeded("failure study: Monte Carlo work exceeds budget");
  FailureStudy out{plan, "monte_carlo", trials};
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    const auto rules = draw_rules(plan, seed, false);
    const auto ev = lattice_event(plan, rules);
    out.coef_failures += ev.coefficient_majority ? 0 : 1;
    out.fom_failures += ev.figure_of_merit_majority ? 0 : 1;
  }
  return out;
}

}  // namespace detail

inline FailureStudy failure_study(const AlgorithmPlan& plan, const std::string& mode, std::size_t trials) {
  bool exhaustive = mode == "exhaustive";
  if (mode == "auto") {
    const auto generators = detail::saturating_power(plan.modulus - 1, plan.dim(), kExhaustiveBudget);
    exhaustive = detail::saturating_power(generators, plan.repetitions, kExhaustiveBudget) <= kExhaustiveBudget;
  }
  auto out = exhaustive ? detail::exhaustive_study(plan) : detail::monte_carlo_study(plan, trials);
  out.empirical = double(out.fom_failures) / double(out.trials);
  out.empirical_coef = double(out.coef_failures) / double(out.trials);
  if (!exhaustive) {
    const double e = std::clamp(plan.eps2, 0.0, 1.0);
    out.sigma = std::sqrt(e * (1.0 - e) / double(out.trials));
    out.half_width = 3.0 * out.sigma;
  }
  out.within_bound = out.empirical <= plan.eps2 + out.half_width;
  return out;
}

inline FailureStudy cmd_failure_study(const ExperimentConfig& cfg) {
  const auto params = cfg.params();
  if (cfg.plan_search) {
    auto plan = search_plan(params, *cfg.plan_search);
    if (!plan) throw ConfigError("config field 'plan_search': no plan reaches eps2 <= target in the given range");
    return failure_study(*plan, cfg.mode, cfg.trials);
  }
  const auto plan = build_plan(params, cfg.tau, cfg.repetitions, single_modulus(cfg, "failure-study"));
  return failure_study(plan, cfg.mode, cfg.trials);
}

}  // namespace medlat
