#pragma once

// Tiny seeded generators for property tests.

#include <cstdint>

#include "serum/random.hpp"
#include "serum/types.hpp"

namespace serum::testkit {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : seq_(seed, rng::Stream::jitter, 0xfeed) {}

  double unit() { return seq_.unit(); }
  double in(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int bit() { return static_cast<int>(seq_.below(2)); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(seq_.below(n)); }

  Prior prior(double lo = 0.05, double hi = 0.95) { return Prior::from_p1(in(lo, hi)); }

  /// Rates with |1 - e1 - e0| >= min_margin; negative-informative allowed.
  ErrorRates rates(double min_margin = 0.01) {
    for (;;) {
      ErrorRates e{unit(), unit()};
      if (e.margin() >= min_margin || -e.margin() >= min_margin) return e;
    }
  }

  ErrorRates informative_rates(double max_sum = 0.9) {
    for (;;) {
      ErrorRates e{in(0.0, max_sum), in(0.0, max_sum)};
      if (e.e1 + e.e0 <= max_sum) return e;
    }
  }

 private:
  rng::Sequence seq_;
};

}  // namespace serum::testkit
