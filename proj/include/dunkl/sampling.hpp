#pragma once

// Counter-based sampling: every sample index owns an independent engine seeded
// from (seed, index), so serial and threaded runs draw identical points.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace dunkl {

class SampleRng {
public:
  SampleRng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedU};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits; bit-identical across platforms.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }

  /// Standard normal by Box-Muller (the std distributions are not portable bit-for-bit).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd unit_vector(int n) {
    Eigen::VectorXd v(n);
    do {
      for (int i = 0; i < n; ++i) v[i] = normal();
    } while (v.norm() < 1e-12);
    return v / v.norm();
  }

  /// Uniform point of the probability simplex in R^n.
  Eigen::VectorXd simplex(int n) {
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) {
      double u = uniform();
      while (u <= 0.0) u = uniform();
      s[i] = -std::log(u);
    }
    return s / s.sum();
  }

private:
  std::mt19937_64 engine_;
};

/// Worker count: DUNKL_THREADS if set and positive, else hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("DUNKL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. Each index is
/// handled exactly once; the first exception thrown is rethrown after joining.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

} // namespace dunkl
