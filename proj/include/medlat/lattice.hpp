#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "medlat/index_set.hpp"
#include "medlat/korobov.hpp"
#include "medlat/primes.hpp"
#include "medlat/random.hpp"

namespace medlat {

/// Fractional part in [0, 1); a result that rounds to 1.0 is mapped to 0.0.
inline double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

/// Rank-1 lattice rule: odd prime modulus N, generating vector z in
/// {1..N-1}^d and an optional shift in [0,1)^d.
class LatticeRule {
 public:
  LatticeRule(std::uint64_t modulus, std::vector<std::int64_t> generator,
              std::optional<std::vector<double>> shift = std::nullopt)
      : modulus_(modulus), generator_(std::move(generator)), shift_(std::move(shift)) {
    if (modulus_ < 3 || modulus_ % 2 == 0 || !is_prime(modulus_))
      throw std::invalid_argument("lattice rule: N = " + std::to_string(modulus_) + " is not an odd prime");
    if (modulus_ > (std::uint64_t(1) << 52))
      throw std::invalid_argument("lattice rule: N exceeds 2^52");
    if (generator_.empty()) throw std::invalid_argument("lattice rule: empty generating vector");
    for (auto z : generator_)
      if (z < 1 || std::uint64_t(z) >= modulus_)
        throw std::invalid_argument("lattice rule: generating vector entries must lie in {1..N-1}");
    if (shift_) {
      if (shift_->size() != generator_.size()) throw std::invalid_argument("lattice rule: shift has wrong dimension");
      for (double s : *shift_)
        if (!(s >= 0.0 && s < 1.0)) throw std::invalid_argument("lattice rule: shift entries must lie in [0,1)");
    }
  }

  std::uint64_t modulus() const { return modulus_; }
  std::size_t dim() const { return generator_.size(); }
  const std::vector<std::int64_t>& generator() const { return generator_; }
  const std::optional<std::vector<double>>& shift() const { return shift_; }

  LatticeRule with_shift(std::vector<double> shift) const { return LatticeRule(modulus_, generator_, std::move(shift)); }
  LatticeRule unshifted() const { return LatticeRule(modulus_, generator_); }

  /// h . z mod N, reduced term by term.
  std::uint64_t residue(const FrequencyVector& h) const {
    if (h.size() != dim()) throw std::invalid_argument("frequency dimension does not match lattice rule");
    const auto n = static_cast<std::int64_t>(modulus_);
    std::uint64_t t = 0;
    for (std::size_t j = 0; j < dim(); ++j) {
      std::int64_t hj = h[j] % n;
      if (hj < 0) hj += n;
      t = (t + detail::mul_mod(std::uint64_t(hj), std::uint64_t(generator_[j]), modulus_)) % modulus_;
    }
    return t;
  }

  /// Coordinate j of node k: frac(k z_j / N + shift_j).
  double node_coordinate(std::uint64_t k, std::size_t j) const {
    const std::uint64_t num = detail::mul_mod(k % modulus_, std::uint64_t(generator_[j]), modulus_);
    const double base = double(num) / double(modulus_);
    return shift_ ? frac(base + (*shift_)[j]) : base;
  }

  std::vector<double> node(std::uint64_t k) const {
    std::vector<double> x(dim());
    for (std::size_t j = 0; j < dim(); ++j) x[j] = node_coordinate(k, j);
    return x;
  }

 private:
  std::uint64_t modulus_;
  std::vector<std::int64_t> generator_;
  std::optional<std::vector<double>> shift_;
};

inline std::vector<std::vector<double>> lattice_points(const LatticeRule& rule) {
  std::vector<std::vector<double>> points;
  points.reserve(rule.modulus());
  for (std::uint64_t k = 0; k < rule.modulus(); ++k) points.push_back(rule.node(k));
  return points;
}

/// z . ell == 0 (mod N).
inline bool dual_contains(const LatticeRule& rule, const FrequencyVector& ell) { return rule.residue(ell) == 0; }

/// Members of an index set whose dual-lattice coset meets the set only in themselves.
struct AliasFreeSet {
  std::vector<bool> mask;             // parallel to the index set
  std::vector<std::size_t> members;  // indices into the index set, ascending

  bool contains(std::size_t index) const { return mask[index]; }
  std::size_t size() const { return members.size(); }
};

/// Residue bucketing: h is alias-free iff its residue h.z mod N is unique in A.
/// Two members share a residue exactly when their difference is a dual point,
/// so this holds for any A.
inline AliasFreeSet alias_free_set(const LatticeRule& rule, const FrequencyIndexSet& set) {
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) keyed[i] = {rule.residue(set[i]), i};
  std::sort(keyed.begin(), keyed.end());

  AliasFreeSet out;
  out.mask.assign(set.size(), false);
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i + 1;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) ++j;
    if (j == i + 1) out.mask[keyed[i].second] = true;
    i = j;
  }
  for (std::size_t i = 0; i < set.size(); ++i)
    if (out.mask[i]) out.members.push_back(i);
  return out;
}

/// True iff no nonzero member of A lies in the dual lattice, i.e. the figure
/// of merit is at least L^{2 alpha} for A = A(L).
inline bool rho_at_least(const LatticeRule& rule, const FrequencyIndexSet& set) {
  for (const auto& h : set.members())
    if (!h.is_zero() && dual_contains(rule, h)) return false;
  return true;
}

inline constexpr double kDefaultRhoCap = 65536.0;

/// Exact figure of merit min_{ell in dual, ell != 0} r(ell) via expanding
/// shells A(2), A(4), ...; nullopt when no dual point is found below the cap.
inline std::optional<double> rho_value(const LatticeRule& rule, const KorobovParams& params,
                                       double cap = kDefaultRhoCap) {
  if (!(cap > 1.0)) throw std::invalid_argument("rho_value: cap must exceed 1");
  if (params.dim() != rule.dim()) throw std::invalid_argument("rho_value: dimension mismatch");
  for (double level = 2.0; level <= cap; level *= 2.0) {
    const auto shell = enumerate_index_set(params, level);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < shell.size(); ++i)
      if (!shell[i].is_zero() && dual_contains(rule, shell[i])) best = std::min(best, shell.r_values()[i]);
    if (std::isfinite(best)) return best;
  }
  return std::nullopt;
}

inline std::vector<std::int64_t> draw_generator(std::uint64_t modulus, std::size_t d, RandomStream& rng) {
  if (modulus < 3) throw std::invalid_argument("draw_generator: requires N >= 3");
  std::uniform_int_distribution<std::int64_t> dist(1, static_cast<std::int64_t>(modulus) - 1);
  std::vector<std::int64_t> z(d);
  for (auto& v : z) v = dist(rng);
  return z;
}

inline std::vector<double> draw_shift(std::size_t d, RandomStream& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> shift(d);
  for (auto& v : shift) {
    v = dist(rng);
    if (v >= 1.0) v = std::nextafter(1.0, 0.0);
  }
  return shift;
}

}  // namespace medlat
