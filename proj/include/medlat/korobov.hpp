#pragma once

#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "medlat/special.hpp"

namespace medlat {

/// Integer frequency vector h in Z^d.
class FrequencyVector {
 public:
  FrequencyVector() = default;
  explicit FrequencyVector(std::size_t d) : h_(d, 0) {}
  FrequencyVector(std::initializer_list<std::int64_t> h) : h_(h) {}
  explicit FrequencyVector(std::vector<std::int64_t> h) : h_(std::move(h)) {}

  std::size_t size() const { return h_.size(); }
  std::int64_t operator[](std::size_t j) const { return h_[j]; }
  std::int64_t& operator[](std::size_t j) { return h_[j]; }
  auto begin() const { return h_.begin(); }
  auto end() const { return h_.end(); }
  std::span<const std::int64_t> values() const { return h_; }

  bool is_zero() const {
    for (auto v : h_)
      if (v != 0) return false;
    return true;
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < h_.size(); ++j)
      if (h_[j] != 0) s.push_back(j);
    return s;
  }

  friend FrequencyVector operator+(FrequencyVector a, const FrequencyVector& b) {
    for (std::size_t j = 0; j < a.size(); ++j) a.h_[j] += b.h_[j];
    return a;
  }
  friend FrequencyVector operator-(FrequencyVector a, const FrequencyVector& b) {
    for (std::size_t j = 0; j < a.size(); ++j) a.h_[j] -= b.h_[j];
    return a;
  }

  auto operator<=>(const FrequencyVector&) const = default;
  bool operator==(const FrequencyVector&) const = default;

 private:
  std::vector<std::int64_t> h_;
};

inline std::string to_string(const FrequencyVector& h) {
  std::string out = "(";
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (j) out += ",";
    out += std::to_string(h[j]);
  }
  return out + ")";
}

/// Sparse Fourier spectrum: frequency -> coefficient.
using Spectrum = std::map<FrequencyVector, std::complex<double>>;

/// Product weights gamma_1 >= gamma_2 >= ... > 0, materialized to length d.
class WeightSequence {
 public:
  enum class Kind { explicit_list, polynomial_decay, geometric_decay };

  static WeightSequence from_list(std::vector<double> values) {
    return WeightSequence(Kind::explicit_list, 0.0, std::move(values));
  }

  /// gamma_j = j^{-s}, j = 1..d.
  static WeightSequence polynomial(double s, std::size_t d) {
    if (!(s >= 0.0)) throw std::invalid_argument("polynomial weights: decay exponent must be >= 0");
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = std::min(1.0, std::pow(double(j + 1), -s));
    return WeightSequence(Kind::polynomial_decay, s, std::move(v));
  }

  /// gamma_j = c^j, j = 1..d.
  static WeightSequence geometric(double c, std::size_t d) {
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("geometric weights: ratio must lie in (0, 1]");
    std::vector<double> v(d);
    double g = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      g *= c;
      v[j] = std::min(1.0, g);
    }
    return WeightSequence(Kind::geometric_decay, c, std::move(v));
  }

  Kind kind() const { return kind_; }
  double rule_parameter() const { return parameter_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<const double> values() const { return values_; }

 private:
  WeightSequence(Kind kind, double parameter, std::vector<double> values)
      : kind_(kind), parameter_(parameter), values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("weights: need at least one coordinate");
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (!(values_[j] > 0.0 && values_[j] <= 1.0))
        throw std::invalid_argument("weights must lie in (0, 1]");
      if (j > 0 && values_[j] > values_[j - 1])
        throw std::invalid_argument("weights must be non-increasing");
    }
  }

  Kind kind_;
  double parameter_;
  std::vector<double> values_;
};

/// Weighted Korobov space parameters (d, alpha, gamma).
class KorobovParams {
 public:
  KorobovParams(double alpha, WeightSequence gamma) : alpha_(alpha), gamma_(std::move(gamma)) {
    if (gamma_.size() < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(alpha_ > 0.5)) throw std::invalid_argument("smoothness alpha must exceed 1/2");
    scale_.resize(gamma_.size());
    for (std::size_t j = 0; j < gamma_.size(); ++j) scale_[j] = std::pow(gamma_[j], -1.0 / (2.0 * alpha_));
  }

  std::size_t dim() const { return gamma_.size(); }
  double alpha() const { return alpha_; }
  const WeightSequence& gamma() const { return gamma_; }
  double gamma(std::size_t j) const { return gamma_[j]; }

  /// gamma_j^{-1/(2 alpha)}, the per-coordinate factor of the rescaled weight.
  double coordinate_scale(std::size_t j) const { return scale_[j]; }

 private:
  double alpha_;
  WeightSequence gamma_;
  std::vector<double> scale_;
};

/// r_{2alpha,gamma}(h) = gamma_supp(h)^{-1} prod_{j in supp} |h_j|^{2 alpha}.
inline double frequency_weight(const FrequencyVector& h, const KorobovParams& params) {
  double r = 1.0;
  const double two_alpha = 2.0 * params.alpha();
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j] == 0) continue;
    r *= std::pow(std::abs(double(h[j])), two_alpha) / params.gamma(j);
  }
  return r;
}

/// r_{1,gamma^{1/(2alpha)}}(h) = prod_{j in supp} gamma_j^{-1/(2alpha)} |h_j|.
inline double scaled_weight_1(const FrequencyVector& h, const KorobovParams& params) {
  double r = 1.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j] == 0) continue;
    r *= std::abs(double(h[j])) * params.coordinate_scale(j);
  }
  return r;
}

/// Squared Korobov norm of a finite spectrum.
inline double korobov_norm_sq(const Spectrum& spectrum, const KorobovParams& params) {
  double total = 0.0;
  for (const auto& [h, c] : spectrum) total += std::norm(c) * frequency_weight(h, params);
  return total;
}

}  // namespace medlat
