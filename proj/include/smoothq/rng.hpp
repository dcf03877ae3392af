#pragma once

#include <cstdint>

namespace smoothq {

namespace detail {

/// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic 64-bit stream (splitmix64). Instances hold no shared state,
/// so independent streams can run on any thread.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return detail::mix64(state_);
  }

  /// Uniform draw on the open interval (0,1); never returns 0 or 1.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Seed for Monte Carlo replication k. Depends only on (master_seed, k), so
/// replications are reproducible independently of scheduling or worker count.
inline std::uint64_t replication_seed(std::uint64_t master_seed,
                                      std::uint64_t replication) {
  return detail::mix64(master_seed ^
                       detail::mix64(replication + 0x632BE59BD9B4E019ull));
}

}  // namespace smoothq
