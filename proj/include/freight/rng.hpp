#pragma once

#include <cstdint>
#include <random>

namespace freight {

/// Named purposes for per-(lane, period) random substreams. Runs that share a
/// seed consume identical draws for identical (purpose, lane, period) keys,
/// which is what makes cross-mechanism couplings work.
enum class Stream : std::uint64_t {
  Arrivals = 1,
  Costs = 2,
  Demand = 3,
  Retention = 4,
  Shuffle = 5,
  ArrivalOrder = 6,
  Init = 7,
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Factory for deterministic substreams derived from one replication seed.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : seed_(seed) {}

  std::mt19937_64 engine(Stream purpose, int lane, int period) const {
    std::uint64_t h = detail::splitmix64(seed_);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    h = detail::splitmix64(h ^ (static_cast<std::uint64_t>(lane) + 1));
    h = detail::splitmix64(h ^ (static_cast<std::uint64_t>(period) + 1));
    return std::mt19937_64(h);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace freight
