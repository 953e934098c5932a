#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "medlat/algorithm.hpp"
#include "medlat/primes.hpp"
#include "medlat/special.hpp"
#include "medlat/test_function.hpp"

namespace medlat {

/// ||A(f) - f||_{L2} via Parseval: in-set coefficient error plus tail energy.
inline double exact_l2_error(const Approximant& approx, const TestFunction& f) {
  const auto& set = *approx.index_set;
  double inside = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) inside += std::norm(approx.coeffs[i] - f.coefficient(set[i]));
  return std::sqrt(inside + f.tail_energy(set));
}

/// Evaluation points with coordinates i_j / M: a tensor grid for d <= 2,
/// otherwise a rank-1 lattice with a prime number of points.
struct EvaluationGrid {
  std::uint64_t modulus = 1;
  std::size_t dim = 1;
  std::vector<std::uint64_t> generator;  // rank-1 case only

  std::uint64_t size() const {
    if (!generator.empty()) return modulus;
    std::uint64_t n = 1;
    for (std::size_t j = 0; j < dim; ++j) n *= modulus;
    return n;
  }

  void indices(std::uint64_t point, std::span<std::uint64_t> out) const {
    if (!generator.empty()) {
      for (std::size_t j = 0; j < dim; ++j) out[j] = (point * generator[j]) % modulus;
      return;
    }
    for (std::size_t j = dim; j-- > 0;) {
      out[j] = point % modulus;
      point /= modulus;
    }
  }
};

inline std::uint64_t default_grid_resolution(std::size_t d) { return d == 1 ? 4096 : (d == 2 ? 512 : 4096); }

inline EvaluationGrid make_evaluation_grid(std::size_t d, std::size_t set_size, std::uint64_t resolution = 0) {
  if (resolution == 0) resolution = default_grid_resolution(d);
  EvaluationGrid grid;
  grid.dim = d;
  if (d <= 2) {
    grid.modulus = resolution;
    return grid;
  }
  grid.modulus = next_prime(std::max<std::uint64_t>({2 * std::uint64_t(set_size), resolution, 5}));
  // Korobov-type generator (1, g, g^2, ...) mod M with g near M / golden ratio.
  const auto g = static_cast<std::uint64_t>(std::llround(double(grid.modulus) * 0.6180339887498949)) % grid.modulus;
  std::uint64_t v = 1;
  for (std::size_t j = 0; j < d; ++j) {
    grid.generator.push_back(v);
    v = (v * std::max<std::uint64_t>(g, 2)) % grid.modulus;
  }
  return grid;
}

/// Values of A(f) - f on every grid point.
inline std::vector<Complex> grid_error_values(const Approximant& approx, const TestFunction& f, const EvaluationGrid& grid) {
  const auto& set = *approx.index_set;
  const std::size_t d = approx.plan.dim();
  const std::uint64_t m = grid.modulus;
  std::vector<Complex> roots(m);
  for (std::uint64_t k = 0; k < m; ++k) {
    const double angle = 2.0 * std::numbers::pi * double(k) / double(m);
    roots[k] = {std::cos(angle), std::sin(angle)};
  }
  // Residues of h_j mod M for every member.
  std::vector<std::uint64_t> reduced(set.size() * d);
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const auto mm = static_cast<std::int64_t>(m);
      reduced[i * d + j] = std::uint64_t(((set[i][j] % mm) + mm) % mm);
    }

  std::vector<Complex> values(grid.size());
  std::vector<std::uint64_t> idx(d);
  std::vector<double> x(d);
  for (std::uint64_t p = 0; p < grid.size(); ++p) {
    grid.indices(p, idx);
    Complex approx_value{};
    for (std::size_t i = 0; i < set.size(); ++i) {
      Complex term = approx.coeffs[i];
      for (std::size_t j = 0; j < d; ++j) term *= roots[(reduced[i * d + j] * idx[j]) % m];
      approx_value += term;
    }
    for (std::size_t j = 0; j < d; ++j) x[j] = double(idx[j]) / double(m);
    values[p] = approx_value - f(std::span<const double>(x));
  }
  return values;
}

/// Discrete L_p norm (mean over grid points); p = infinity gives the max.
inline double grid_norm(std::span<const Complex> values, double p) {
  if (values.empty()) return 0.0;
  if (std::isinf(p)) {
    double mx = 0.0;
    for (const auto& v : values) mx = std::max(mx, std::abs(v));
    return mx;
  }
  long double acc = 0.0L;
  for (const auto& v : values) acc += std::pow(static_cast<long double>(std::abs(v)), static_cast<long double>(p));
  return static_cast<double>(std::pow(acc / values.size(), 1.0L / p));
}

struct LinfError {
  double upper = 0.0;     // sum_{h in A} |c_h - f^(h)| + sum_{h not in A} |f^(h)|
  double grid_max = 0.0;  // max over the evaluation grid
};

inline LinfError linf_error(const Approximant& approx, const TestFunction& f, std::uint64_t grid_resolution = 0) {
  const auto& set = *approx.index_set;
  LinfError out;
  for (std::size_t i = 0; i < set.size(); ++i) out.upper += std::abs(approx.coeffs[i] - f.coefficient(set[i]));
  out.upper += f.tail_l1(set);
  const auto grid = make_evaluation_grid(approx.plan.dim(), set.size(), grid_resolution);
  out.grid_max = grid_norm(grid_error_values(approx, f, grid), std::numeric_limits<double>::infinity());
  return out;
}

/// ||g||_{L2}^{2/p} ||g||_{L_inf}^{1-2/p} for 2 < p < infinity.
inline double lp_interpolated(double l2, double linf, double p) {
  if (!(p > 2.0)) throw std::invalid_argument("lp_interpolated: requires p > 2 (use the L2 error for p <= 2)");
  if (l2 < 0.0 || linf < 0.0) throw std::invalid_argument("lp_interpolated: norms must be non-negative");
  if (std::isinf(p)) return linf;
  return std::pow(l2, 2.0 / p) * std::pow(linf, 1.0 - 2.0 / p);
}

/// Upper bound on sum_{k not in A(M)} 1 / r_{2alpha,gamma}(k) for q in (1/(2 alpha), 1).
inline double tail_sum_bound(double level, double q, const KorobovParams& params) {
  const double alpha = params.alpha();
  if (!(q > 1.0 / (2.0 * alpha) && q < 1.0)) throw std::invalid_argument("tail_sum_bound: q must lie in (1/(2 alpha), 1)");
  if (!(level >= 1.0)) throw std::invalid_argument("tail_sum_bound: requires M >= 1");
  const double lead = std::pow(std::sqrt(params.gamma(0)) * std::pow(level, 2.0 * alpha), -(1.0 / q - 1.0) / (2.0 * alpha));
  const double zeta = riemann_zeta(2.0 * alpha * q);
  double product = 1.0;
  for (std::size_t j = 0; j < params.dim(); ++j) product *= std::pow(1.0 + 2.0 * std::pow(params.gamma(j), q) * zeta, 1.0 / q);
  return lead * q / (1.0 - q) * product;
}

struct LinfBound {
  double value = 0.0;
  double q = 0.0;
};

inline constexpr int kBoundGridPoints = 64;

/// (2R + 1) sqrt(tail_sum_bound(N2, q)); q minimized over a 64-point grid when absent.
inline LinfBound theorem_linf_bound(const AlgorithmPlan& plan, std::optional<double> q = std::nullopt) {
  if (!(plan.n2 > 1.0)) throw std::domain_error("theorem_linf_bound: requires N2 > 1");
  const double factor = 2.0 * double(plan.repetitions) + 1.0;
  auto at = [&](double qq) { return factor * std::sqrt(tail_sum_bound(plan.n2, qq, plan.params)); };
  if (q) return {at(*q), *q};
  const double lo = 1.0 / (2.0 * plan.params.alpha()) + 1e-3;
  const double hi = 1.0 - 1e-3;
  if (!(lo < hi)) throw std::domain_error("theorem_linf_bound: empty q range");
  LinfBound best{std::numeric_limits<double>::infinity(), lo};
  for (int i = 0; i < kBoundGridPoints; ++i) {
    const double qq = lo + (hi - lo) * i / (kBoundGridPoints - 1);
    const double v = at(qq);
    if (v < best.value) best = {v, qq};
  }
  return best;
}

/// (1 + log2 N2)^{(d-1)/2} / N2^alpha: the shape of the L2 rate, no constant.
inline double theorem_l2_rate_reference(const AlgorithmPlan& plan) {
  if (!(plan.n2 > 1.0)) throw std::domain_error("theorem_l2_rate_reference: requires N2 > 1");
  return std::pow(1.0 + std::log2(plan.n2), (double(plan.dim()) - 1.0) / 2.0) * std::pow(plan.n2, -plan.params.alpha());
}

struct RateFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Least-squares slope of log(error) against log(N).
inline RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw std::invalid_argument("fit_rate: needs at least 4 points");
  std::vector<double> xs, ys;
  for (const auto& [n, e] : points) {
    if (!(n > 0.0) || !(e > 0.0)) throw std::invalid_argument("fit_rate: N and error must be positive");
    xs.push_back(std::log(n));
    ys.push_back(std::log(e));
  }
  const double k = double(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 1e-300) throw std::invalid_argument("fit_rate: all N are equal");
  RateFit fit;
  fit.slope = sxy / sxx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double pred = my + fit.slope * (xs[i] - mx);
    ss_res += (ys[i] - pred) * (ys[i] - pred);
  }
  fit.r_squared = syy <= 1e-300 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

struct LpEntry {
  double p = 0.0;
  double interpolated = 0.0;  // lp_interpolated(l2, linf_upper, p)
  double grid = 0.0;          // discrete L_p of the error on the evaluation grid
};

struct ErrorReport {
  double l2 = 0.0;
  double linf_upper = 0.0;
  double linf_grid = 0.0;
  double l2_grid = 0.0;
  std::vector<LpEntry> lp;
};

inline ErrorReport measure_errors(const Approximant& approx, const TestFunction& f, std::span<const double> p_list,
                                  std::uint64_t grid_resolution = 0) {
  ErrorReport report;
  report.l2 = exact_l2_error(approx, f);
  const auto& set = *approx.index_set;
  for (std::size_t i = 0; i < set.size(); ++i) report.linf_upper += std::abs(approx.coeffs[i] - f.coefficient(set[i]));
  report.linf_upper += f.tail_l1(set);
  const auto grid = make_evaluation_grid(approx.plan.dim(), set.size(), grid_resolution);
  const auto values = grid_error_values(approx, f, grid);
  report.linf_grid = grid_norm(values, std::numeric_limits<double>::infinity());
  report.l2_grid = grid_norm(values, 2.0);
  for (double p : p_list) report.lp.push_back({p, lp_interpolated(report.l2, report.linf_upper, p), grid_norm(values, p)});
  return report;
}

}  // namespace medlat
