#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace medlat {

// Natural log is used for every "log" in the plan formulas; log2 appears only
// in the L2 rate shape.
inline double plan_log(double x) { return std::log(x); }

namespace detail {

// B_2, B_4, ..., B_24
inline constexpr std::array<double, 12> kBernoulliEven = {
    1.0 / 6.0,          -1.0 / 30.0,          1.0 / 42.0,
    -1.0 / 30.0,        5.0 / 66.0,           -691.0 / 2730.0,
    7.0 / 6.0,          -3617.0 / 510.0,      43867.0 / 798.0,
    -174611.0 / 330.0,  854513.0 / 138.0,     -236364091.0 / 2730.0};

}  // namespace detail

/// Hurwitz zeta  sum_{n>=0} (n + a)^{-s}  for s > 1, a > 0.
///
/// Evaluated as a short direct sum followed by the Euler-Maclaurin tail with
/// Bernoulli corrections up to B_24; relative error is below 1e-14 on the
/// range used here (1 < s <= 200, 0 < a <= 1e6).
inline double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0)) throw std::domain_error("hurwitz_zeta: requires s > 1");
  if (!(a > 0.0)) throw std::domain_error("hurwitz_zeta: requires a > 0");
  constexpr int kDirect = 32;
  double sum = 0.0;
  for (int n = kDirect - 1; n >= 0; --n) sum += std::pow(n + a, -s);
  const double m = kDirect + a;
  double tail = std::pow(m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(m, -s);
  // term_k = B_2k / (2k)! * s (s+1) ... (s+2k-2) * m^{-s-2k+1}
  double rising = s;                   // s (s+1) ... (s+2k-2)
  double power = std::pow(m, -s - 1);  // m^{-s-2k+1}
  double factorial = 2.0;              // (2k)!
  for (std::size_t k = 1; k <= detail::kBernoulliEven.size(); ++k) {
    const double term = detail::kBernoulliEven[k - 1] / factorial * rising * power;
    tail += term;
    if (std::abs(term) < 1e-18 * std::abs(sum + tail)) break;
    rising *= (s + 2.0 * k - 1) * (s + 2.0 * k);
    power /= m * m;
    factorial *= (2.0 * k + 1) * (2.0 * k + 2);
  }
  return sum + tail;
}

/// Riemann zeta for real s > 1.
inline double riemann_zeta(double s) {
  if (!(s > 1.0)) throw std::domain_error("riemann_zeta: requires s > 1");
  return hurwitz_zeta(s, 1.0);
}

namespace detail {

// zeta(n) for integer n = 2..kZetaTableSize-1 (entries 0 and 1 unused).
inline constexpr int kZetaTableSize = 160;

inline const std::array<double, kZetaTableSize>& integer_zeta_table() {
  static const std::array<double, kZetaTableSize> table = [] {
    std::array<double, kZetaTableSize> t{};
    for (int n = 2; n < kZetaTableSize; ++n) t[n] = riemann_zeta(n);
    return t;
  }();
  return table;
}

inline double integer_zeta(int n) {
  return n < kZetaTableSize ? integer_zeta_table()[n] : 1.0;
}

}  // namespace detail

/// sum_{m >= 1} cos(2 pi m x) / m^s for integer s >= 2.
///
/// Real part of Li_s(e^{2 pi i x}) from the logarithmic expansion of the
/// polylogarithm around mu = 0, valid for |mu| < 2 pi. x is first reduced to
/// [-1/2, 1/2]. For even s the expansion terminates (Bernoulli polynomial);
/// for odd s the tail is driven by zeta at negative odd integers and decays
/// like 4^{-j}.
inline double periodic_cosine_series(int s, double x) {
  if (s < 2 || s > 100) throw std::domain_error("periodic_cosine_series: requires 2 <= s <= 100");
  x -= std::round(x);
  if (x == 0.0) return detail::integer_zeta(s);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double u = two_pi * x;

  double total = 0.0;
  // Regular terms zeta(s-k) mu^k / k! with k even, k <= s-2.
  double uk_over_fact = 1.0;  // u^k / k!
  for (int k = 0; k <= s - 2; k += 2) {
    if (k > 0) uk_over_fact *= u * u / (static_cast<double>(k - 1) * k);
    const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
    total += sign * detail::integer_zeta(s - k) * uk_over_fact;
  }
  double harmonic = 0.0;
  for (int i = 1; i < s; ++i) harmonic += 1.0 / i;
  double u_pow = 1.0;  // u^{s-1} / (s-1)!
  for (int i = 1; i <= s - 1; ++i) u_pow *= u / i;

  if (s % 2 == 1) {
    const double sign = ((s - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    total += sign * u_pow * (harmonic - std::log(two_pi * std::abs(x)));
    // zeta(1-2j) mu^k / k! with k = s-1+2j.
    const double scale = std::pow(two_pi, s - 1);
    double x_pow = std::pow(x, s - 1);
    for (int j = 1; j <= 60; ++j) {
      const int k = s - 1 + 2 * j;
      x_pow *= x * x;
      // (2j-1)! / k! = 1 / ((2j) (2j+1) ... k)
      double ratio = 1.0;
      for (int i = 2 * j; i <= k; ++i) ratio /= i;
      const double sign_j = ((j + k / 2) % 2 == 0) ? 1.0 : -1.0;
      const double term = sign_j * 2.0 * detail::integer_zeta(2 * j) * scale * x_pow * ratio;
      total += term;
      if (std::abs(term) < 1e-18) break;
    }
  } else {
    const double sign = ((s - 2) / 2) % 2 == 0 ? 1.0 : -1.0;
    const double c = sign * u_pow;
    total -= c * std::numbers::pi / 2.0 * (x > 0 ? 1.0 : -1.0);
    // zeta(0) = -1/2 at k = s
    const double sign_s = (s / 2) % 2 == 0 ? 1.0 : -1.0;
    total += -0.5 * sign_s * u_pow * u / s;
  }
  return total;
}

}  // namespace medlat
