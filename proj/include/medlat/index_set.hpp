#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "medlat/korobov.hpp"

namespace medlat {

/// Absolute log-space margin for the strict membership test r(h) < L^{2 alpha}.
/// Frequencies within this margin of the boundary are excluded.
inline constexpr double kMembershipLogTolerance = 1e-12;

/// Weighted hyperbolic cross A_{d,alpha,gamma}(L) in lexicographic order.
class FrequencyIndexSet {
 public:
  FrequencyIndexSet(KorobovParams params, double threshold, std::vector<FrequencyVector> members,
                    std::vector<double> r_values)
      : params_(std::move(params)),
        threshold_(threshold),
        members_(std::move(members)),
        r_values_(std::move(r_values)) {}

  const KorobovParams& params() const { return params_; }
  std::size_t dim() const { return params_.dim(); }
  double threshold() const { return threshold_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<FrequencyVector>& members() const { return members_; }
  const FrequencyVector& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<double>& r_values() const { return r_values_; }

  std::optional<std::size_t> index_of(const FrequencyVector& h) const {
    auto it = std::lower_bound(members_.begin(), members_.end(), h);
    if (it == members_.end() || *it != h) return std::nullopt;
    return static_cast<std::size_t>(it - members_.begin());
  }
  bool contains(const FrequencyVector& h) const { return index_of(h).has_value(); }

  /// Largest |h_j| over members, per coordinate.
  std::vector<std::int64_t> projection_radius() const {
    std::vector<std::int64_t> radius(dim(), 0);
    for (const auto& h : members_)
      for (std::size_t j = 0; j < dim(); ++j) radius[j] = std::max(radius[j], std::abs(h[j]));
    return radius;
  }

 private:
  KorobovParams params_;
  double threshold_;
  std::vector<FrequencyVector> members_;
  std::vector<double> r_values_;
};

/// Membership predicate for A(L), evaluated in log space.
inline bool in_index_set(const FrequencyVector& h, const KorobovParams& params, double threshold) {
  if (!(threshold > 0.0)) return false;
  double log_weight = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j)
    if (h[j] != 0) log_weight += std::log(std::abs(double(h[j])) * params.coordinate_scale(j));
  return log_weight < std::log(threshold) - kMembershipLogTolerance;
}

namespace detail {

inline void enumerate_recursive(const KorobovParams& params, double log_budget, std::size_t j,
                                double used, FrequencyVector& current,
                                std::vector<FrequencyVector>& out) {
  if (j == params.dim()) {
    out.push_back(current);
    return;
  }
  const double log_scale = std::log(params.coordinate_scale(j));
  // Admissible magnitudes 1..m_max in this coordinate given the budget used so far.
  std::vector<double> usage;
  for (std::int64_t m = 1;; ++m) {
    const double u = used + std::log(double(m)) + log_scale;
    if (!(u < log_budget)) break;
    usage.push_back(u);
  }
  const auto m_max = static_cast<std::int64_t>(usage.size());
  for (std::int64_t v = -m_max; v <= m_max; ++v) {
    current[j] = v;
    const double next = v == 0 ? used : usage[std::abs(v) - 1];
    enumerate_recursive(params, log_budget, j + 1, next, current, out);
  }
  current[j] = 0;
}

}  // namespace detail

/// Enumerates { h : r_{1,gamma^{1/(2alpha)}}(h) < L } by depth-first recursion
/// over coordinates, pruning on the remaining multiplicative budget.
inline FrequencyIndexSet enumerate_index_set(const KorobovParams& params, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("enumerate_index_set: threshold must be >= 0");
  std::vector<FrequencyVector> members;
  if (threshold > 0.0) {
    const double log_budget = std::log(threshold) - kMembershipLogTolerance;
    if (log_budget > 0.0) {
      FrequencyVector current(params.dim());
      detail::enumerate_recursive(params, log_budget, 0, 0.0, current, members);
    }
  }
  std::vector<double> r_values;
  r_values.reserve(members.size());
  for (const auto& h : members) r_values.push_back(frequency_weight(h, params));
  return FrequencyIndexSet(params, threshold, std::move(members), std::move(r_values));
}

/// 1 + (N - 1) / (1 + tau log N2), the size bound for A(N2).
inline double cardinality_bound(std::uint64_t modulus, double tau, double n2) {
  if (!(n2 > 1.0)) throw std::domain_error("cardinality_bound: requires N2 > 1");
  if (!(tau > 0.0)) throw std::domain_error("cardinality_bound: requires tau > 0");
  return 1.0 + double(modulus - 1) / (1.0 + tau * plan_log(n2));
}

}  // namespace medlat
