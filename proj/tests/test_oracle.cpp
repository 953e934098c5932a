#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "medlat/oracle.hpp"

using namespace medlat;

namespace {
FrequencyIndexSet members_set(const KorobovParams& p, std::vector<FrequencyVector> members) {
  std::vector<double> r;
  for (const auto& h : members) r.push_back(frequency_weight(h, p));
  return FrequencyIndexSet(p, 0.0, std::move(members), std::move(r));
}
}  // namespace

TEST(Oracle, NaiveCoefficients) {
  const auto set = share(enumerate_index_set(KorobovParams(1.0, WeightSequence::from_list({1.0})), 2.5));
  const auto one = oracle::naive_coefficients([](std::span<const double>) { return Complex(1.0); }, LatticeRule(5, {2}), set);
  EXPECT_NEAR(std::abs(one.coeffs[2] - 1.0), 0.0, 1e-15);
  const auto tone = oracle::naive_coefficients(
      [](std::span<const double> x) { return std::polar(1.0, 2 * std::numbers::pi * x[0]); }, LatticeRule(5, {2}), set);
  EXPECT_NEAR(std::abs(tone.coeffs[3] - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(tone.coeffs[1]), 0.0, 1e-14);
}

TEST(Oracle, ExhaustiveProbability) {
  const KorobovParams p1(1.0, WeightSequence::from_list({1.0}));
  const auto A = enumerate_index_set(p1, 2.5);
  for (const auto& h : A.members()) EXPECT_EQ(oracle::exhaustive_alias_probability(5, 1, A, h).count, 0u);

  const KorobovParams p2(1.0, WeightSequence::from_list({1.0, 1.0}));
  const auto B = members_set(p2, {FrequencyVector{0, 0}, FrequencyVector{0, 1}, FrequencyVector{1, 0}});
  // (1,0) collides with (0,1) iff z1 == z2 and never with (0,0): 4 of 16 vectors.
  const auto pr = oracle::exhaustive_alias_probability(5, 2, B, FrequencyVector{1, 0});
  EXPECT_EQ(pr.count, 4u);
  EXPECT_EQ(pr.total, 16u);
  EXPECT_THROW(oracle::exhaustive_alias_probability(1009, 2, B, FrequencyVector{1, 0}), BudgetExceeded);
}

TEST(Oracle, BoxScanRho) {
  const KorobovParams p1(1.0, WeightSequence::from_list({1.0}));
  EXPECT_EQ(oracle::box_scan_rho(LatticeRule(5, {2}), p1, 10), 25.0);
  EXPECT_TRUE(std::isinf(oracle::box_scan_rho(LatticeRule(5, {2}), p1, 4)));
  const KorobovParams p2(1.0, WeightSequence::from_list({1.0, 1.0}));
  EXPECT_EQ(oracle::box_scan_rho(LatticeRule(5, {1, 1}), p2, 6), 1.0);
  const KorobovParams p4(1.0, WeightSequence::from_list({1.0, 1.0, 1.0, 1.0}));
  EXPECT_THROW(oracle::box_scan_rho(LatticeRule(5, {1, 1, 1, 1}), p4, 60), BudgetExceeded);
}

TEST(Oracle, DualFiberSum) {
  const LatticeRule rule(5, {2});
  const Spectrum s{{FrequencyVector{1}, 1.0}, {FrequencyVector{6}, 0.5}, {FrequencyVector{2}, 3.0}};
  EXPECT_NEAR(std::abs(oracle::dual_fiber_sum(s, rule, FrequencyVector{1}) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(oracle::dual_fiber_sum(s, rule, FrequencyVector{2})), 0.0, 1e-15);
  const auto shifted = rule.with_shift({0.1});
  // ell = 5, shift 0.1: phase e^{2 pi i 0.5} = -1
  EXPECT_NEAR(std::abs(oracle::dual_fiber_sum(s, shifted, FrequencyVector{1}) + 0.5), 0.0, 1e-14);
}
