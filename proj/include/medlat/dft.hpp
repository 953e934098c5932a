#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace medlat {

using Complex = std::complex<double>;

namespace detail {

inline Complex unit_root(std::uint64_t numerator, std::uint64_t denominator, double sign) {
  const double angle = sign * 2.0 * std::numbers::pi * double(numerator) / double(denominator);
  return {std::cos(angle), std::sin(angle)};
}

/// In-place iterative radix-2 FFT with precomputed twiddles (sign -1 forward).
class Radix2Fft {
 public:
  explicit Radix2Fft(std::size_t size) : size_(size), twiddle_(size / 2) {
    if (size == 0 || (size & (size - 1)) != 0) throw std::invalid_argument("Radix2Fft: size must be a power of two");
    for (std::size_t k = 0; k < size / 2; ++k) twiddle_[k] = unit_root(k, size, -1.0);
  }

  std::size_t size() const { return size_; }

  void forward(std::span<Complex> a) const { transform(a, false); }
  void inverse_unscaled(std::span<Complex> a) const { transform(a, true); }

 private:
  void transform(std::span<Complex> a, bool inverse) const {
    const std::size_t n = size_;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t step = n / len;
      for (std::size_t i = 0; i < n; i += len) {
        for (std::size_t k = 0; k < len / 2; ++k) {
          Complex w = twiddle_[k * step];
          if (inverse) w = std::conj(w);
          const Complex u = a[i + k];
          const Complex v = a[i + k + len / 2] * w;
          a[i + k] = u + v;
          a[i + k + len / 2] = u - v;
        }
      }
    }
  }

  std::size_t size_;
  std::vector<Complex> twiddle_;
};

}  // namespace detail

/// Normalized forward transform G(t) = (1/N) sum_k f_k exp(-2 pi i k t / N)
/// for arbitrary length N. Lengths up to kDirectLimit use direct summation
/// with an exact twiddle table; powers of two use radix-2; everything else
/// goes through Bluestein's chirp convolution padded to a power of two.
class DftPlan {
 public:
  static constexpr std::size_t kDirectLimit = 64;

  explicit DftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("DftPlan: length must be >= 1");
    if (n <= kDirectLimit) {
      twiddle_.resize(n);
      for (std::size_t m = 0; m < n; ++m) twiddle_[m] = detail::unit_root(m, n, -1.0);
    } else if ((n & (n - 1)) == 0) {
      fft_.emplace(n);
    } else {
      std::size_t m = 1;
      while (m < 2 * n - 1) m <<= 1;
      fft_.emplace(m);
      chirp_.resize(n);
      // exp(-pi i k^2 / N) with k^2 reduced mod 2N to keep the angle small.
      for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t k2 = (std::uint64_t(k) * k) % (2 * std::uint64_t(n));
        chirp_[k] = detail::unit_root(k2, 2 * n, -1.0);
      }
      kernel_.assign(m, Complex{});
      kernel_[0] = std::conj(chirp_[0]);
      for (std::size_t k = 1; k < n; ++k) kernel_[k] = kernel_[m - k] = std::conj(chirp_[k]);
      fft_->forward(kernel_);
    }
  }

  std::size_t size() const { return n_; }

  std::vector<Complex> forward(std::span<const Complex> samples) const {
    if (samples.size() != n_) throw std::invalid_argument("DftPlan: sample count does not match plan length");
    const double scale = 1.0 / double(n_);
    std::vector<Complex> out(n_);
    if (!twiddle_.empty()) {
      for (std::size_t t = 0; t < n_; ++t) {
        Complex acc{};
        std::size_t idx = 0;
        for (std::size_t k = 0; k < n_; ++k) {
          acc += samples[k] * twiddle_[idx];
          idx += t;
          if (idx >= n_) idx -= n_;
        }
        out[t] = acc * scale;
      }
    } else if (chirp_.empty()) {
      out.assign(samples.begin(), samples.end());
      fft_->forward(out);
      for (auto& v : out) v *= scale;
    } else {
      const auto& fft = *fft_;
      std::vector<Complex> work(fft.size(), Complex{});
      for (std::size_t k = 0; k < n_; ++k) work[k] = samples[k] * chirp_[k];
      fft.forward(work);
      for (std::size_t i = 0; i < work.size(); ++i) work[i] *= kernel_[i];
      fft.inverse_unscaled(work);
      const double conv_scale = scale / double(fft.size());
      for (std::size_t t = 0; t < n_; ++t) out[t] = work[t] * chirp_[t] * conv_scale;
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<Complex> twiddle_;
  std::optional<detail::Radix2Fft> fft_;
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_;
};

inline std::vector<Complex> forward_transform(std::span<const Complex> samples) {
  return DftPlan(samples.size()).forward(samples);
}

}  // namespace medlat
