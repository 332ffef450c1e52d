#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mtmeta {

/// Seedable, splittable random source with a platform-independent bit stream.
///
/// A stream is identified by (seed, index). Its engine is std::mt19937_64,
/// whose output sequence is fixed by the C++ standard, seeded with
/// splitmix64(seed ^ splitmix64(index + 1)). Bounded integers use rejection
/// sampling on raw 64-bit outputs rather than std::uniform_int_distribution,
/// whose algorithm is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t index = 0);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mtmeta
