#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pgff {

constexpr double pi = 3.141592653589793238462643383279502884;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: the state is derived from (seed, a, b) only, so draws
/// for a given key do not depend on the order in which keys are visited.
class KeyedRng {
public:
  using result_type = std::uint64_t;

  KeyedRng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0)
      : state_(splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1), never exactly 0.
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double th = 2.0 * pi * uniform();
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

private:
  std::uint64_t state_;
  double spare_ = 0;
  bool has_spare_ = false;
};

/// Runs fn(begin, end) over [0, n) split into `threads` contiguous chunks.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)> &fn);

/// Resolves a requested thread count (0 = hardware concurrency).
int resolve_threads(int requested);

struct MeanSE {
  double mean = 0;
  double se = 0;
};

/// Batch-means estimate for a correlated series.
MeanSE batch_means(std::span<const double> xs, int batches = 50);
MeanSE iid_mean(std::span<const double> xs);

/// Potential scale reduction from splitting the series into two halves.
double split_rhat(std::span<const double> xs);

double log_sum_exp(std::span<const double> xs);

} // namespace pgff
