// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace hinf::detail {

// Runs fn(i) for i in [0, count). With `parallel` the iterations are split
// statically over the OpenMP team; the first exception thrown by any
// iteration is rethrown on the calling thread after the loop.
template <class Fn>
void for_each_index(std::size_t count, bool parallel, Fn&& fn) {
  if (!parallel || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hinf::detail
