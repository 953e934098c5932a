#pragma once

// Brute-force reference implementations. None of these share code with the
// fast paths they are used to check; they favor directness over speed.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "medlat/errors.hpp"
#include "medlat/estimator.hpp"
#include "medlat/index_set.hpp"
#include "medlat/korobov.hpp"
#include "medlat/lattice.hpp"

namespace medlat::oracle {

inline constexpr std::uint64_t kProbabilityBudget = 1'000'000;
inline constexpr std::uint64_t kBoxBudget = 10'000'000;

namespace detail {

// (sum_j v_j z_j) mod N without per-term reduction, in 128-bit arithmetic.
inline std::int64_t dot_mod(std::span<const std::int64_t> v, std::span<const std::int64_t> z, std::int64_t n) {
  __int128 acc = 0;
  for (std::size_t j = 0; j < v.size(); ++j) acc += static_cast<__int128>(v[j]) * z[j];
  auto r = static_cast<std::int64_t>(acc % n);
  return r < 0 ? r + n : r;
}

inline double weight(std::span<const std::int64_t> h, const KorobovParams& params) {
  double r = 1.0;
  for (std::size_t j = 0; j < h.size(); ++j)
    if (h[j] != 0) r *= std::pow(std::abs(double(h[j])), 2.0 * params.alpha()) / params.gamma(j);
  return r;
}

}  // namespace detail

/// (1/N) sum_k f({k z/N + shift}) exp(-2 pi i h . (k z/N + shift)), term by term.
template <SampleFunction F>
SpectrumEstimate naive_coefficients(const F& f, const LatticeRule& rule, IndexSetPtr set) {
  const std::uint64_t n = rule.modulus();
  const std::size_t d = rule.dim();
  std::vector<Complex> coeffs(set->size(), Complex{});
  std::vector<long double> raw(d);
  std::vector<double> x(d);
  for (std::uint64_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      raw[j] = static_cast<long double>(k) * rule.generator()[j] / static_cast<long double>(n);
      if (rule.shift()) raw[j] += (*rule.shift())[j];
      x[j] = static_cast<double>(raw[j] - std::floor(raw[j]));
    }
    const Complex fx = static_cast<Complex>(f(std::span<const double>(x)));
    for (std::size_t i = 0; i < set->size(); ++i) {
      long double phase = 0.0L;
      for (std::size_t j = 0; j < d; ++j) phase += static_cast<long double>((*set)[i][j]) * raw[j];
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(phase - std::floor(phase));
      coeffs[i] += fx * Complex(std::cos(angle), std::sin(angle));
    }
  }
  for (auto& c : coeffs) c /= double(n);
  return SpectrumEstimate{set, std::move(coeffs), rule, 0, n};
}

/// K by definition: h is kept iff (h - k) . z != 0 mod N for every other k in A.
inline AliasFreeSet pairwise_alias_free(const LatticeRule& rule, const FrequencyIndexSet& set) {
  const auto n = static_cast<std::int64_t>(rule.modulus());
  AliasFreeSet out;
  out.mask.assign(set.size(), true);
  std::vector<std::int64_t> diff(set.dim());
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = 0; b < set.size() && out.mask[a]; ++b) {
      if (a == b) continue;
      for (std::size_t j = 0; j < set.dim(); ++j) diff[j] = set[a][j] - set[b][j];
      if (detail::dot_mod(diff, rule.generator(), n) == 0) out.mask[a] = false;
    }
  }
  for (std::size_t i = 0; i < set.size(); ++i)
    if (out.mask[i]) out.members.push_back(i);
  return out;
}

/// Exact Pr(h not alias-free) for z uniform on {1..N-1}^d, as count / total.
struct ExactProbability {
  std::uint64_t count = 0;
  std::uint64_t total = 0;
  double value() const { return double(count) / double(total); }
};

inline ExactProbability exhaustive_alias_probability(std::uint64_t modulus, std::size_t d, const FrequencyIndexSet& set,
                                                     const FrequencyVector& h) {
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < d; ++j) {
    total *= modulus - 1;
    if (total > kProbabilityBudget)
      throw BudgetExceeded("exhaustive_alias_probability: (N-1)^d exceeds " + std::to_string(kProbabilityBudget));
  }
  const auto n = static_cast<std::int64_t>(modulus);
  std::vector<std::vector<std::int64_t>> diffs;
  for (const auto& k : set.members()) {
    if (k == h) continue;
    std::vector<std::int64_t> diff(d);
    for (std::size_t j = 0; j < d; ++j) diff[j] = h[j] - k[j];
    diffs.push_back(std::move(diff));
  }
  ExactProbability out{0, total};
  std::vector<std::int64_t> z(d, 1);
  for (std::uint64_t t = 0; t < total; ++t) {
    std::uint64_t rest = t;
    for (std::size_t j = 0; j < d; ++j) {
      z[j] = 1 + static_cast<std::int64_t>(rest % (modulus - 1));
      rest /= modulus - 1;
    }
    for (const auto& diff : diffs) {
      if (detail::dot_mod(diff, z, n) == 0) {
        ++out.count;
        break;
      }
    }
  }
  return out;
}

/// Smallest frequency weight over nonzero dual points in the box [-B, B]^d;
/// +infinity when the box holds none.
inline double box_scan_rho(const LatticeRule& rule, const KorobovParams& params, std::int64_t radius) {
  const std::size_t d = rule.dim();
  std::uint64_t count = 1;
  for (std::size_t j = 0; j < d; ++j) {
    count *= std::uint64_t(2 * radius + 1);
    if (count > kBoxBudget) throw BudgetExceeded("box_scan_rho: box exceeds " + std::to_string(kBoxBudget) + " points");
  }
  const auto n = static_cast<std::int64_t>(rule.modulus());
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> ell(d);
  for (std::uint64_t t = 0; t < count; ++t) {
    std::uint64_t rest = t;
    bool zero = true;
    for (std::size_t j = 0; j < d; ++j) {
      ell[j] = static_cast<std::int64_t>(rest % std::uint64_t(2 * radius + 1)) - radius;
      rest /= std::uint64_t(2 * radius + 1);
      zero = zero && ell[j] == 0;
    }
    if (zero || detail::dot_mod(ell, rule.generator(), n) != 0) continue;
    best = std::min(best, detail::weight(ell, params));
  }
  return best;
}

/// { h in [-B, B]^d : r(h) < L^{2 alpha} } by exhaustive scan, lexicographic.
inline std::vector<FrequencyVector> box_scan_index_set(const KorobovParams& params, double threshold, std::int64_t radius) {
  const std::size_t d = params.dim();
  std::uint64_t count = 1;
  for (std::size_t j = 0; j < d; ++j) {
    count *= std::uint64_t(2 * radius + 1);
    if (count > kBoxBudget) throw BudgetExceeded("box_scan_index_set: box too large");
  }
  const double limit = std::pow(threshold, 2.0 * params.alpha());
  std::vector<FrequencyVector> out;
  std::vector<std::int64_t> h(d);
  for (std::uint64_t t = 0; t < count; ++t) {
    std::uint64_t rest = t;
    for (std::size_t j = d; j-- > 0;) {
      h[j] = static_cast<std::int64_t>(rest % std::uint64_t(2 * radius + 1)) - radius;
      rest /= std::uint64_t(2 * radius + 1);
    }
    if (detail::weight(h, params) < limit) out.emplace_back(h);
  }
  return out;
}

/// Predicted estimator error at h for a sparse spectrum:
/// sum over ell in dual \ {0} of f^(h + ell) exp(2 pi i ell . shift).
inline Complex dual_fiber_sum(const Spectrum& spectrum, const LatticeRule& rule, const FrequencyVector& h) {
  const auto n = static_cast<std::int64_t>(rule.modulus());
  Complex total{};
  std::vector<std::int64_t> ell(h.size());
  for (const auto& [k, c] : spectrum) {
    if (k == h) continue;
    for (std::size_t j = 0; j < h.size(); ++j) ell[j] = k[j] - h[j];
    if (detail::dot_mod(ell, rule.generator(), n) != 0) continue;
    Complex phase{1.0, 0.0};
    if (rule.shift()) {
      long double t = 0.0L;
      for (std::size_t j = 0; j < h.size(); ++j) t += static_cast<long double>(ell[j]) * (*rule.shift())[j];
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(t - std::floor(t));
      phase = {std::cos(angle), std::sin(angle)};
    }
    total += c * phase;
  }
  return total;
}

}  // namespace medlat::oracle
