#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "medlat/medlat.hpp"

namespace medlat::fixtures {

inline std::vector<std::uint64_t> small_primes(std::uint64_t lo, std::uint64_t hi) { return odd_primes_between(lo, hi); }

// Random non-increasing weights in [lo, 1].
inline WeightSequence random_weights(std::size_t d, std::mt19937_64& rng, double lo = 0.05) {
  std::uniform_real_distribution<double> u(lo, 1.0);
  std::vector<double> g(d);
  for (auto& v : g) v = u(rng);
  std::sort(g.begin(), g.end(), std::greater<>());
  return WeightSequence::from_list(g);
}

// Random spectrum with `terms` entries, frequencies in [-radius, radius]^d.
inline Spectrum random_spectrum(std::size_t d, std::size_t terms, std::int64_t radius, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> coord(-radius, radius);
  std::normal_distribution<double> value(0.0, 1.0);
  Spectrum s;
  while (s.size() < terms) {
    std::vector<std::int64_t> h(d);
    for (auto& v : h) v = coord(rng);
    s[FrequencyVector(h)] = Complex(value(rng), value(rng));
  }
  return s;
}

// Random spectrum supported on members of an index set.
inline Spectrum spectrum_on(const FrequencyIndexSet& set, std::size_t terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  std::normal_distribution<double> value(0.0, 1.0);
  Spectrum s;
  while (s.size() < std::min(terms, set.size())) s[set[pick(rng)]] = Complex(value(rng), value(rng));
  return s;
}

inline LatticeRule random_rule(std::uint64_t n, std::size_t d, std::mt19937_64& rng, bool shifted = false) {
  std::uniform_int_distribution<std::int64_t> z(1, std::int64_t(n) - 1);
  std::vector<std::int64_t> g(d);
  for (auto& v : g) v = z(rng);
  if (!shifted) return LatticeRule(n, g);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> shift(d);
  for (auto& v : shift) v = u(rng);
  return LatticeRule(n, g, shift);
}

}  // namespace medlat::fixtures
