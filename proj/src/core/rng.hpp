#pragma once

#include <cstdint>
#include <vector>

namespace medroute {

// SplitMix64. The bit pattern of every draw is part of the on-disk
// contract (augmentation goldens, checkpoint reproducibility), so this
// stays hand-rolled rather than delegating to <random>.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 bits of entropy.
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Plain modulo, pinned for portability of
  // golden values; modulo bias is irrelevant at the sizes involved.
  uint64_t below(uint64_t n) { return next() % n; }

  // In-place Fisher-Yates with j = next() % (i + 1).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = size_t(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace medroute
