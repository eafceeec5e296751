#include "fsoacq/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <stdexcept>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fsoacq {

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser over a combination of the two words
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + (index + 1) * 0xD1B54A32D192ED03ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

unsigned default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  std::vector<std::jthread> pool;
  const unsigned extra = std::min<std::size_t>(workers, n) - 1;
  pool.reserve(extra);
  for (unsigned w = 0; w < extra; ++w) pool.emplace_back(run);
  run();
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, unsigned max_depth) {
  if (a == b) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, max_depth, rel_tol, &error);
}

SampleMoments moments(std::span<const double> xs) {
  SampleMoments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  // Welford
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double delta = x - mean;
    mean += delta / double(k);
    m2 += delta * (x - mean);
  }
  m.mean = mean;
  m.std_dev = k > 1 ? std::sqrt(m2 / double(k - 1)) : 0.0;
  return m;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * double(i) / double(n - 1);
  out.back() = hi;
  return out;
}

std::vector<double> geomspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw std::invalid_argument("geomspace: bounds must be positive");
  auto out = linspace(std::log(lo), std::log(hi), n);
  for (auto& x : out) x = std::exp(x);
  if (n > 0) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

}  // namespace fsoacq
