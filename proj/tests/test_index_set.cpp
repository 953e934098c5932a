#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "medlat/index_set.hpp"
#include "medlat/oracle.hpp"
#include "support.hpp"

using namespace medlat;

namespace {
KorobovParams unit_1d(double alpha = 1.0) { return KorobovParams(alpha, WeightSequence::from_list({1.0})); }

std::vector<FrequencyVector> range_1d(std::int64_t lo, std::int64_t hi) {
  std::vector<FrequencyVector> out;
  for (auto v = lo; v <= hi; ++v) out.push_back(FrequencyVector{v});
  return out;
}
}  // namespace

TEST(IndexSet, OneDimensionalInterval) {
  const auto set = enumerate_index_set(unit_1d(), 2.5);
  EXPECT_EQ(set.members(), range_1d(-2, 2));
  EXPECT_EQ(set.size(), 5u);
}

TEST(IndexSet, StrictAtOne) { EXPECT_TRUE(enumerate_index_set(unit_1d(), 1.0).empty()); }

TEST(IndexSet, BoundaryTiesExcluded) {
  EXPECT_EQ(enumerate_index_set(unit_1d(), 2.0).members(), range_1d(-1, 1));
  EXPECT_EQ(enumerate_index_set(unit_1d(), 3.0).members(), range_1d(-2, 2));
  // r((2,1)) = 4 with gamma = (1, 1) and alpha = 1: L = 2 sits on the boundary.
  const KorobovParams p(1.0, WeightSequence::from_list({1.0, 1.0}));
  EXPECT_FALSE(enumerate_index_set(p, 2.0).contains(FrequencyVector{2, 1}));
  EXPECT_FALSE(enumerate_index_set(p, 2.0).contains(FrequencyVector{2, 0}));
  EXPECT_TRUE(enumerate_index_set(p, 2.0).contains(FrequencyVector{1, 1}));
}

TEST(IndexSet, TwoDimensionalMatchesBoxScan) {
  const KorobovParams p(1.0, WeightSequence::from_list({1.0, 1.0}));
  const auto set = enumerate_index_set(p, 2.5);
  EXPECT_EQ(set.members(), oracle::box_scan_index_set(p, 2.5, 3));
  EXPECT_TRUE(set.contains(FrequencyVector{2, 1}));
  EXPECT_TRUE(set.contains(FrequencyVector{-2, 1}));
  EXPECT_FALSE(set.contains(FrequencyVector{3, 0}));
  EXPECT_FALSE(set.contains(FrequencyVector{2, 2}));
}

TEST(IndexSet, RandomConfigsMatchBoxScan) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> level(1.0, 7.0);
  const double alphas[] = {0.6, 0.75, 1.0, 1.5, 2.0};
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + t % 3;
    const KorobovParams p(alphas[t % 5], fixtures::random_weights(d, rng));
    const double L = level(rng);
    const auto radius = static_cast<std::int64_t>(std::ceil(L));
    const auto set = enumerate_index_set(p, L);
    ASSERT_EQ(set.members(), oracle::box_scan_index_set(p, L, radius)) << "t=" << t << " L=" << L;
    for (std::size_t i = 0; i < set.size(); ++i)
      EXPECT_NEAR(set.r_values()[i], frequency_weight(set[i], p), 1e-12 * set.r_values()[i]);
  }
}

TEST(IndexSet, LexicographicAndSymmetric) {
  const KorobovParams p(1.3, WeightSequence::from_list({1.0, 0.6, 0.3}));
  const auto set = enumerate_index_set(p, 5.0);
  EXPECT_TRUE(std::is_sorted(set.members().begin(), set.members().end()));
  EXPECT_TRUE(std::adjacent_find(set.members().begin(), set.members().end()) == set.members().end());
  for (const auto& h : set.members()) {
    FrequencyVector neg(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) neg[j] = -h[j];
    EXPECT_TRUE(set.contains(neg));
    EXPECT_TRUE(in_index_set(h, p, 5.0));
  }
}

TEST(IndexSet, Monotone) {
  const KorobovParams p(1.0, WeightSequence::from_list({1.0, 0.5}));
  std::size_t previous = 0;
  for (double L = 1.0; L < 30.0; L *= 1.3) {
    const auto set = enumerate_index_set(p, L);
    EXPECT_GE(set.size(), previous);
    previous = set.size();
  }
}

TEST(IndexSet, LookupAndRadius) {
  const auto set = enumerate_index_set(KorobovParams(1.0, WeightSequence::from_list({1.0, 0.25})), 4.0);
  for (std::size_t i = 0; i < set.size(); ++i) EXPECT_EQ(set.index_of(set[i]), i);
  EXPECT_FALSE(set.index_of(FrequencyVector{100, 0}).has_value());
  EXPECT_EQ(set.projection_radius(), (std::vector<std::int64_t>{3, 1}));
}

TEST(IndexSet, NegativeThresholdRejected) { EXPECT_THROW(enumerate_index_set(unit_1d(), -1.0), std::invalid_argument); }

TEST(CardinalityBound, HandValue) {
  EXPECT_NEAR(cardinality_bound(97, 1.0, 2.9067), 1.0 + 96.0 / (1.0 + std::log(2.9067)), 1e-12);
  EXPECT_NEAR(cardinality_bound(97, 1.0, 2.9067), 47.44, 0.01);
}

TEST(CardinalityBound, DecreasesInTauTowardOne) {
  double previous = cardinality_bound(97, 0.1, 3.0);
  for (double tau = 0.2; tau < 1e9; tau *= 3.0) {
    const double b = cardinality_bound(97, tau, 3.0);
    EXPECT_LT(b, previous);
    previous = b;
  }
  EXPECT_NEAR(cardinality_bound(97, 1e12, 3.0), 1.0, 1e-9);
}

TEST(CardinalityBound, RejectsSmallLevel) {
  EXPECT_THROW(cardinality_bound(97, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(cardinality_bound(97, 0.0, 2.0), std::domain_error);
}
