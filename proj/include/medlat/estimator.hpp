#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "medlat/dft.hpp"
#include "medlat/index_set.hpp"
#include "medlat/lattice.hpp"

namespace medlat {

/// Anything callable on a point of [0,1)^d that yields a (complex) value.
template <class F>
concept SampleFunction = requires(const F& f, std::span<const double> x) {
  { f(x) } -> std::convertible_to<Complex>;
};

using IndexSetPtr = std::shared_ptr<const FrequencyIndexSet>;

inline IndexSetPtr share(FrequencyIndexSet set) { return std::make_shared<const FrequencyIndexSet>(std::move(set)); }

/// Coefficient estimates for every member of an index set from one lattice rule.
struct SpectrumEstimate {
  IndexSetPtr index_set;
  std::vector<Complex> coeffs;  // parallel to index_set->members()
  LatticeRule rule;
  std::size_t repetition = 0;
  std::uint64_t evaluations = 0;
};

/// exp(-2 pi i h . shift), with the phase reduced mod 1 before exponentiation.
inline Complex shift_phase(const FrequencyVector& h, std::span<const double> shift) {
  long double phase = 0.0L;
  for (std::size_t j = 0; j < h.size(); ++j) {
    const long double term = static_cast<long double>(h[j]) * shift[j];
    phase += term - std::floor(term);
  }
  const double reduced = static_cast<double>(phase - std::floor(phase));
  const double angle = -2.0 * std::numbers::pi * reduced;
  return {std::cos(angle), std::sin(angle)};
}

/// f evaluated at the N (possibly shifted) lattice nodes, k = 0..N-1.
template <SampleFunction F>
std::vector<Complex> sample_at_nodes(const F& f, const LatticeRule& rule) {
  const std::uint64_t n = rule.modulus();
  std::vector<Complex> samples(n);
  std::vector<double> x(rule.dim());
  for (std::uint64_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < rule.dim(); ++j) x[j] = rule.node_coordinate(k, j);
    samples[k] = static_cast<Complex>(f(std::span<const double>(x)));
  }
  return samples;
}

/// Reads coefficient estimates off the transformed samples: the estimate at h
/// is G(h . z mod N), times exp(-2 pi i h . shift) for shifted rules.
inline std::vector<Complex> coefficients_from_transform(std::span<const Complex> transformed, const LatticeRule& rule,
                                                        const FrequencyIndexSet& set) {
  std::vector<Complex> coeffs(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    Complex c = transformed[rule.residue(set[i])];
    if (rule.shift()) c *= shift_phase(set[i], *rule.shift());
    coeffs[i] = c;
  }
  return coeffs;
}

/// Lattice estimate of every Fourier coefficient in the index set: one length-N
/// transform of the node samples plus a residue lookup per frequency. Uses the
/// rule's shift when present.
template <SampleFunction F>
SpectrumEstimate estimate_coefficients(const F& f, const LatticeRule& rule, IndexSetPtr set,
                                       std::size_t repetition = 0, const DftPlan* plan = nullptr) {
  if (!set) throw std::invalid_argument("estimate_coefficients: null index set");
  if (set->dim() != rule.dim()) throw std::invalid_argument("estimate_coefficients: dimension mismatch");
  const auto samples = sample_at_nodes(f, rule);
  std::vector<Complex> transformed;
  if (plan && plan->size() == samples.size())
    transformed = plan->forward(samples);
  else
    transformed = forward_transform(samples);
  auto coeffs = coefficients_from_transform(transformed, rule, *set);
  return SpectrumEstimate{std::move(set), std::move(coeffs), rule, repetition, rule.modulus()};
}

template <SampleFunction F>
SpectrumEstimate estimate_coefficients_shifted(const F& f, const LatticeRule& rule, IndexSetPtr set,
                                               std::size_t repetition = 0, const DftPlan* plan = nullptr) {
  if (!rule.shift()) throw std::invalid_argument("estimate_coefficients_shifted: rule has no shift");
  return estimate_coefficients(f, rule, std::move(set), repetition, plan);
}

}  // namespace medlat
