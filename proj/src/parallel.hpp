#pragma once

#include <cstddef>
#include <exception>

namespace gpinv::detail {

// Runs body(i) for i in [0, count) on the OpenMP team, largest index first so
// a dynamic schedule starts on the most expensive truncations. The first
// exception thrown by any iteration is rethrown on the calling thread.
template <typename Body>
void parallel_for_desc(std::size_t count, Body&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long idx = static_cast<long long>(count) - 1; idx >= 0; --idx) {
    try {
      body(static_cast<std::size_t>(idx));
    } catch (...) {
#pragma omp critical(gpinv_parallel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace gpinv::detail
