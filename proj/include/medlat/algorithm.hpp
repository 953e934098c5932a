#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "medlat/dft.hpp"
#include "medlat/estimator.hpp"
#include "medlat/index_set.hpp"
#include "medlat/lattice.hpp"
#include "medlat/median.hpp"
#include "medlat/random.hpp"

namespace medlat {

/// Everything the median lattice algorithm fixes before sampling.
struct AlgorithmPlan {
  KorobovParams params;
  double tau = 1.0;
  std::size_t repetitions = 3;  // R, odd
  std::uint64_t modulus = 3;    // N, odd prime
  double p_nd = 0.0;            // prod_j (1 + 2 gamma_j^{1/(2alpha)} (1 + tau log N))
  double n2 = 0.0;              // (N - 1) / (exp(1/tau) P_{N,d})
  IndexSetPtr index_set;        // A(N2)
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::uint64_t total_evaluations = 0;
  bool guaranteed = false;  // N2 > 1 and eps2 <= 1
  std::vector<std::string> warnings;

  std::size_t majority() const { return (repetitions + 1) / 2; }
  std::size_t dim() const { return params.dim(); }
};

inline constexpr double kDefaultTau = 1.0;

inline double failure_probability(std::size_t set_size, double tau, double n2, std::size_t majority, double numerator) {
  if (!(n2 > 1.0)) return std::numeric_limits<double>::infinity();
  const double base = numerator / (1.0 + tau * plan_log(n2));
  return 0.5 * double(set_size) * std::pow(base, double(majority));
}

inline AlgorithmPlan build_plan(const KorobovParams& params, double tau, std::size_t repetitions,
                                std::uint64_t modulus) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("plan: tau must be a positive finite number");
  if (repetitions < 3 || repetitions % 2 == 0) throw std::invalid_argument("plan: R must be odd and > 1");
  if (modulus < 3 || modulus % 2 == 0 || !is_prime(modulus))
    throw std::invalid_argument("plan: N = " + std::to_string(modulus) + " is not an odd prime");

  const double log_n = plan_log(double(modulus));
  double p_nd = 1.0;
  for (std::size_t j = 0; j < params.dim(); ++j)
    p_nd *= 1.0 + 2.0 * std::pow(params.gamma(j), 1.0 / (2.0 * params.alpha())) * (1.0 + tau * log_n);
  const double n2 = double(modulus - 1) / (std::exp(1.0 / tau) * p_nd);

  AlgorithmPlan plan{params, tau, repetitions, modulus, p_nd, n2, nullptr, 0.0, 0.0, 0, false, {}};
  plan.index_set = share(enumerate_index_set(params, n2));
  const std::size_t card = plan.index_set->size();
  plan.eps1 = failure_probability(card, tau, n2, plan.majority(), 4.0);
  plan.eps2 = failure_probability(card, tau, n2, plan.majority(), 8.0);
  plan.total_evaluations = std::uint64_t(repetitions) * modulus;
  plan.guaranteed = n2 > 1.0 && plan.eps2 <= 1.0;

  if (!(n2 > 1.0)) plan.warnings.push_back("N2 <= 1: index set is empty and the approximant is zero");
  else if (plan.eps2 > 1.0) plan.warnings.push_back("eps2 > 1: no probabilistic guarantee for this plan");

  if (card < modulus) {
    const auto half = static_cast<std::int64_t>((modulus - 1) / 2);
    for (auto radius : plan.index_set->projection_radius())
      if (radius > half) throw std::logic_error("plan: index set projection exceeds (N-1)/2 although |A| < N");
  } else if (card > 0) {
    plan.warnings.push_back("|A| >= N: some coefficients alias in every repetition");
  }
  return plan;
}

/// The R lattice rules a run with this seed uses.
inline std::vector<LatticeRule> draw_rules(const AlgorithmPlan& plan, std::uint64_t seed, bool use_shifts) {
  std::vector<LatticeRule> rules;
  rules.reserve(plan.repetitions);
  for (std::size_t r = 0; r < plan.repetitions; ++r) {
    auto zs = generator_stream(seed, r);
    auto z = draw_generator(plan.modulus, plan.dim(), zs);
    if (use_shifts) {
      auto ss = shift_stream(seed, r);
      rules.emplace_back(plan.modulus, std::move(z), draw_shift(plan.dim(), ss));
    } else {
      rules.emplace_back(plan.modulus, std::move(z));
    }
  }
  return rules;
}

struct RunOptions {
  bool use_shifts = false;
  unsigned workers = 1;  // > 1 requires f to tolerate concurrent calls
};

/// Output of one run: the truncated Fourier series over A with median coefficients.
struct Approximant {
  IndexSetPtr index_set;
  std::vector<Complex> coeffs;
  AlgorithmPlan plan;
  std::uint64_t seed = 0;
  bool shifted = false;
  std::vector<SpectrumEstimate> estimates;  // per repetition, in order r = 0..R-1
  std::uint64_t evaluations = 0;

  std::vector<LatticeRule> rules() const {
    std::vector<LatticeRule> out;
    for (const auto& e : estimates) out.push_back(e.rule);
    return out;
  }
};

template <SampleFunction F>
Approximant run(const F& f, const AlgorithmPlan& plan, std::uint64_t seed, const RunOptions& options = {}) {
  const auto rules = draw_rules(plan, seed, options.use_shifts);
  const DftPlan dft(plan.modulus);
  std::vector<SpectrumEstimate> estimates(plan.repetitions, SpectrumEstimate{plan.index_set, {}, rules.front()});

  auto work = [&](std::size_t r) { estimates[r] = estimate_coefficients(f, rules[r], plan.index_set, r, &dft); };
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, unsigned(plan.repetitions)));
  if (workers == 1) {
    for (std::size_t r = 0; r < plan.repetitions; ++r) work(r);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = w; r < plan.repetitions; r += workers) work(r);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  auto median = aggregate(estimates);
  std::uint64_t evaluations = 0;
  for (const auto& e : estimates) evaluations += e.evaluations;
  return Approximant{plan.index_set, std::move(median.coeffs), plan, seed, options.use_shifts,
                     std::move(estimates), evaluations};
}

/// sum_{h in A} c_h exp(2 pi i h . x)
inline Complex evaluate(const FrequencyIndexSet& set, std::span<const Complex> coeffs, std::span<const double> x) {
  Complex total{};
  for (std::size_t i = 0; i < set.size(); ++i) {
    long double phase = 0.0L;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (set[i][j] == 0) continue;
      const long double term = static_cast<long double>(set[i][j]) * x[j];
      phase += term - std::floor(term);
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase - std::floor(phase));
    total += coeffs[i] * Complex(std::cos(angle), std::sin(angle));
  }
  return total;
}

inline Complex evaluate(const Approximant& approx, std::span<const double> x) {
  if (x.size() != approx.plan.dim()) throw std::invalid_argument("evaluate: point has wrong dimension");
  return evaluate(*approx.index_set, approx.coeffs, x);
}

inline std::vector<Complex> evaluate_batch(const Approximant& approx, const std::vector<std::vector<double>>& points) {
  std::vector<Complex> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(evaluate(approx, x));
  return out;
}

/// Which alias-free events hold for a set of rules drawn for a plan.
struct LatticeEvent {
  // every h in A is alias-free in at least ceil(R/2) repetitions
  bool coefficient_majority = false;
  // the same, counting only repetitions whose figure of merit is >= N2^{2 alpha}
  bool figure_of_merit_majority = false;
  std::size_t min_alias_free_count = 0;
  std::size_t min_good_rule_count = 0;
  std::size_t good_rules = 0;  // |{r : rho(z_r) >= N2^{2 alpha}}|
};

inline LatticeEvent lattice_event(const AlgorithmPlan& plan, std::span<const LatticeRule> rules) {
  const auto& set = *plan.index_set;
  LatticeEvent ev;
  std::vector<std::size_t> all(set.size(), 0), good(set.size(), 0);
  for (const auto& rule : rules) {
    const auto k = alias_free_set(rule, set);
    const bool rho_ok = rho_at_least(rule, set);
    ev.good_rules += rho_ok ? 1 : 0;
    for (std::size_t i : k.members) {
      ++all[i];
      if (rho_ok) ++good[i];
    }
  }
  ev.min_alias_free_count = set.empty() ? rules.size() : *std::min_element(all.begin(), all.end());
  ev.min_good_rule_count = set.empty() ? ev.good_rules : *std::min_element(good.begin(), good.end());
  ev.coefficient_majority = ev.min_alias_free_count >= plan.majority();
  ev.figure_of_merit_majority = ev.min_good_rule_count >= plan.majority();
  return ev;
}

}  // namespace medlat
