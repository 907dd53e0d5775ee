#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace sdlab {

/// Every data-parallel kernel has a serial reference path; both must produce
/// bit-identical results (reductions always run in index order).
enum class Exec { serial, parallel };

void set_num_threads(int threads);
int max_threads();

template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace sdlab
