#pragma once

// Portable seeded generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the standard distributions are not, so
// bounded integers are drawn by rejection sampling on the raw 64-bit output.
// Identical seeds give identical streams on every platform.

#include <cstdint>
#include <random>

namespace atlas {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  // Derive an independent stream for a named sub-task.
  Rng fork(std::uint64_t salt) { return Rng(next() ^ (salt * 0x9E3779B97F4A7C15ULL)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace atlas
