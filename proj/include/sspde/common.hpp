#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sspde {

/// Invalid input: bad parameters, violated preconditions, schema errors.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure during a numerical computation (non-finite values, solver did not converge).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double last_valid_time = 0.0)
      : std::runtime_error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// Resource caps applied to enumerations.
struct Limits {
  std::uint64_t max_cells = 59049;              // 3^10
  std::uint64_t max_samples = std::uint64_t{1} << 24;
};

/// k^m, throwing if the result exceeds `cap`.
inline std::uint64_t checked_power(int k, int m, std::uint64_t cap) {
  if (k < 2) throw ValidationError("alphabet size k must be >= 2");
  if (m < 0) throw ValidationError("level m must be >= 0");
  std::uint64_t n = 1;
  for (int i = 0; i < m; ++i) {
    n *= static_cast<std::uint64_t>(k);
    if (n > cap) {
      throw ValidationError("k^m = " + std::to_string(k) + "^" + std::to_string(m) +
                            " exceeds the configured cap of " + std::to_string(cap));
    }
  }
  return n;
}

inline std::size_t& default_thread_count() {
  static std::size_t n = 1;
  return n;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is visited exactly once;
/// callers write results into preallocated slots so ordering never depends on the schedule.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         std::size_t threads = default_thread_count()) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < n; i += threads) fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sspde
