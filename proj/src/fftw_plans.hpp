#pragma once

#include <fftw3.h>

#include <mutex>

namespace choquard::detail {

// FFTW planning is not thread-safe; executing an existing plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace choquard::detail
