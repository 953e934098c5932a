#pragma once

#include <cstdint>
#include <random>

namespace medlat {

using RandomStream = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream derived from a master seed and a stable stream index.
inline RandomStream make_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  const std::uint64_t a = splitmix64(master_seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream_index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{std::uint32_t(a), std::uint32_t(a >> 32), std::uint32_t(b), std::uint32_t(b >> 32)};
  return RandomStream(seq);
}

// Repetition r draws its generating vector from stream 2r and its shift from
// stream 2r+1, so shifted and unshifted runs with one seed share every z_r.
inline RandomStream generator_stream(std::uint64_t seed, std::size_t repetition) {
  return make_stream(seed, 2 * std::uint64_t(repetition));
}
inline RandomStream shift_stream(std::uint64_t seed, std::size_t repetition) {
  return make_stream(seed, 2 * std::uint64_t(repetition) + 1);
}

}  // namespace medlat
