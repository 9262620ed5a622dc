#pragma once

// Counter-based randomness. Every draw is a pure function of
// (master seed, stream label, key...), so consumers never share state and
// parallel execution order cannot change results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace serum::rng {

enum class Stream : std::uint64_t {
  world = 1,
  rates = 2,
  assignment = 3,
  signals = 4,
  strategies = 5,
  sampling = 6,
  reference = 7,
  order = 8,
  bootstrap = 9,
  jitter = 10,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                               std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed ^ 0x5e8a7c3b1d2f4e6aULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  return splitmix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
}

/// Uniform in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr double uniform(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                         std::uint64_t b = 0, std::uint64_t c = 0) {
  return to_unit(derive(seed, stream, a, b, c));
}

constexpr bool bernoulli(double p, std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                         std::uint64_t b = 0, std::uint64_t c = 0) {
  return uniform(seed, stream, a, b, c) < p;
}

/// Sequential generator for places that need a stream of draws
/// (shuffles, bootstrap resamples). Portable: no std distributions.
class Sequence {
 public:
  explicit Sequence(std::uint64_t state) : state_(state) {}
  Sequence(std::uint64_t seed, Stream stream, std::uint64_t a = 0, std::uint64_t b = 0)
      : state_(derive(seed, stream, a, b)) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double unit() { return to_unit(next()); }

  /// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n) {
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<u128>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace serum::rng
