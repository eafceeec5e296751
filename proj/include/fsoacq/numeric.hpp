#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace fsoacq {

using Rng = std::mt19937_64;

/// Seed for an independent substream. Trial loops derive one stream per
/// (seed, index) so results do not depend on how trials are scheduled.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  return Rng{substream_seed(seed, index)};
}

/// Runs body(i) for i in [0, n). Iterations must write only to their own
/// slots; with workers <= 1 everything runs on the calling thread.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& body);

/// Worker count used by the Monte Carlo drivers (hardware concurrency).
unsigned default_workers();

/// Monte Carlo trials are processed in fixed-size blocks, one RNG stream each.
inline constexpr std::int64_t kTrialBlock = 4096;

// Standard normal CDF, accurate deep into both tails.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Adaptive Gauss-Kronrod (61-point) on [a, b]; either end may be infinite.
/// Stops when the error estimate falls below rel_tol * |I|.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, unsigned max_depth = 20);

struct SampleMoments {
  double mean = 0.0;
  double std_dev = 0.0;  // n - 1 normalisation
  std::size_t count = 0;

  double std_error() const { return count > 0 ? std_dev / std::sqrt(double(count)) : 0.0; }
};

SampleMoments moments(std::span<const double> xs);

/// Evenly spaced points, both ends included.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Geometrically spaced points, both ends included; lo, hi > 0.
std::vector<double> geomspace(double lo, double hi, std::size_t n);

}  // namespace fsoacq
