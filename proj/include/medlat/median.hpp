#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "medlat/estimator.hpp"

namespace medlat {

/// Middle order statistic of an odd-length list of reals.
inline double odd_median(std::span<const double> values) {
  if (values.empty() || values.size() % 2 == 0)
    throw std::invalid_argument("median: requires an odd, non-empty list");
  std::vector<double> v(values.begin(), values.end());
  for (double x : v)
    if (std::isnan(x)) throw std::invalid_argument("median: NaN input");
  const auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

/// Componentwise complex median: median of real parts + i * median of imaginary parts.
inline Complex complex_median(std::span<const Complex> values) {
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    re[r] = values[r].real();
    im[r] = values[r].imag();
  }
  return {odd_median(re), odd_median(im)};
}

struct MedianAggregate {
  IndexSetPtr index_set;
  std::vector<Complex> coeffs;
  std::size_t repetitions = 0;
};

/// Per-frequency complex median across R estimates over a common index set.
inline MedianAggregate aggregate(std::span<const SpectrumEstimate> estimates) {
  const std::size_t reps = estimates.size();
  if (reps < 3 || reps % 2 == 0) throw std::invalid_argument("aggregate: R must be odd and > 1");
  const IndexSetPtr& set = estimates.front().index_set;
  for (const auto& e : estimates) {
    if (e.index_set != set && !(e.index_set && set && e.index_set->members() == set->members()))
      throw std::invalid_argument("aggregate: estimates use different index sets");
    if (e.coeffs.size() != set->size()) throw std::invalid_argument("aggregate: coefficient count mismatch");
  }
  MedianAggregate out{set, std::vector<Complex>(set->size()), reps};
  std::vector<Complex> column(reps);
  for (std::size_t i = 0; i < set->size(); ++i) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = estimates[r].coeffs[i];
    out.coeffs[i] = complex_median(column);
  }
  return out;
}

}  // namespace medlat
