#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace stylevis {

/// How a per-item stage kernel runs. threads == 1 selects the serial
/// reference loop; anything larger fans out over an OpenMP team.
struct Execution {
  int threads = 1;

  static Execution serial() { return {1}; }
  static Execution parallel(int n) { return {n < 1 ? 1 : n}; }
  bool is_serial() const { return threads <= 1; }
};

/// Serial reference: visits 0..n-1 in order.
template <class Fn>
void for_each_index_serial(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

/// Calls fn(i) for every i in [0, n). Iterations must write only to
/// slot i of their output. The first exception thrown by any iteration is
/// rethrown after the team joins.
template <class Fn>
void for_each_index(std::size_t n, const Execution& exec, Fn&& fn) {
  if (exec.is_serial() || n < 2) {
    for_each_index_serial(n, fn);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(exec.threads)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stylevis
