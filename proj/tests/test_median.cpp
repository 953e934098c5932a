#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "medlat/median.hpp"
#include "support.hpp"

using namespace medlat;

namespace {

double sorted_middle(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::vector<SpectrumEstimate> estimates_for(IndexSetPtr set, const std::vector<std::vector<Complex>>& columns) {
  std::vector<SpectrumEstimate> out;
  for (std::size_t r = 0; r < columns.size(); ++r) out.push_back({set, columns[r], LatticeRule(5, {1}), r, 5});
  return out;
}

IndexSetPtr small_set() { return share(enumerate_index_set(KorobovParams(1.0, WeightSequence::from_list({1.0})), 2.5)); }

}  // namespace

TEST(ComplexMedian, Examples) {
  EXPECT_EQ(complex_median(std::vector<Complex>{{2, 2}}), Complex(2, 2));
  EXPECT_EQ(complex_median(std::vector<Complex>{{1, 2}, {3, 0}, {2, 5}}), Complex(2, 2));
  EXPECT_EQ(complex_median(std::vector<Complex>{0.0, 0.0, 100.0}), Complex(0.0));
}

TEST(ComplexMedian, RejectsBadInput) {
  EXPECT_THROW(complex_median(std::vector<Complex>{}), std::invalid_argument);
  EXPECT_THROW(complex_median(std::vector<Complex>{1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(complex_median(std::vector<Complex>{1.0, std::numeric_limits<double>::quiet_NaN(), 2.0}),
               std::invalid_argument);
}

TEST(ComplexMedian, MajorityWins) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> v(0.0, 1e6);
  for (int t = 0; t < 200; ++t) {
    const std::size_t R = 3 + 2 * (t % 5);
    const Complex c{v(rng), v(rng)};
    std::vector<Complex> values(R, c);
    for (std::size_t r = 0; r < R / 2; ++r) values[rng() % R] = {v(rng), v(rng)};
    if (std::count(values.begin(), values.end(), c) >= long(R + 1) / 2) {
      EXPECT_EQ(complex_median(values), c);
    }
  }
}

TEST(ComplexMedian, SumDomination) {
  // For x_r >= 0 and any J with |J| >= (R+1)/2: median x <= sum_{r in J} x_r.
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> v(1.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t R = 1 + 2 * (t % 7);
    std::vector<double> x(R);
    for (auto& e : x) e = t % 3 == 0 ? std::floor(v(rng) * 3) : v(rng);
    std::vector<std::size_t> idx(R);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t size = (R + 1) / 2 + rng() % (R - (R + 1) / 2 + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) sum += x[idx[i]];
    EXPECT_LE(odd_median(x), sum);
  }
}

TEST(ComplexMedian, DistanceToAnyPoint) {
  // |median(Z) - w| <= 2 median_r |Z_r - w|
  std::mt19937_64 rng(3);
  std::normal_distribution<double> v(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t R = 1 + 2 * (t % 8);
    const Complex w{v(rng), v(rng)};
    std::vector<Complex> z(R);
    std::vector<double> dist(R);
    for (std::size_t r = 0; r < R; ++r) {
      z[r] = w + Complex(v(rng), v(rng)) * (r % 3 == 0 ? 100.0 : 1.0);
      dist[r] = std::abs(z[r] - w);
    }
    EXPECT_LE(std::abs(complex_median(z) - w), 2.0 * odd_median(dist) * (1 + 1e-15));
  }
}

TEST(Aggregate, IdenticalEstimates) {
  const auto set = small_set();
  const std::vector<Complex> c{1.0, {2.0, -1.0}, 3.0, 4.0, {0.0, 5.0}};
  const auto agg = aggregate(estimates_for(set, {c, c, c, c, c}));
  EXPECT_EQ(agg.coeffs, c);
  EXPECT_EQ(agg.repetitions, 5u);
}

TEST(Aggregate, CorruptedMinority) {
  const auto set = small_set();
  const std::vector<Complex> c{1.0, 2.0, 3.0, 4.0, 5.0};
  auto bad = c;
  bad[2] = 1e6;
  EXPECT_EQ(aggregate(estimates_for(set, {c, bad, c})).coeffs, c);
}

TEST(Aggregate, MatchesSortReference) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> v(0.0, 1.0);
  const auto set = small_set();
  for (int t = 0; t < 100; ++t) {
    std::vector<std::vector<Complex>> cols(5, std::vector<Complex>(set->size()));
    for (auto& col : cols)
      for (auto& c : col) c = {v(rng), v(rng)};
    const auto agg = aggregate(estimates_for(set, cols));
    for (std::size_t i = 0; i < set->size(); ++i) {
      std::vector<double> re, im;
      for (const auto& col : cols) {
        re.push_back(col[i].real());
        im.push_back(col[i].imag());
      }
      EXPECT_EQ(agg.coeffs[i], Complex(sorted_middle(re), sorted_middle(im)));
    }
  }
}

TEST(Aggregate, RejectsMismatch) {
  const auto set = small_set();
  const std::vector<Complex> c(5, 1.0);
  EXPECT_THROW(aggregate(estimates_for(set, {c, c})), std::invalid_argument);
  EXPECT_THROW(aggregate(estimates_for(set, {c})), std::invalid_argument);
  auto other = share(enumerate_index_set(KorobovParams(1.0, WeightSequence::from_list({1.0})), 3.5));
  auto mixed = estimates_for(set, {c, c, c});
  mixed[1].index_set = other;
  mixed[1].coeffs.assign(other->size(), 1.0);
  EXPECT_THROW(aggregate(mixed), std::invalid_argument);
}
