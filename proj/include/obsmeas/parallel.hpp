#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace obsmeas {

/// Worker count: hardware concurrency capped by OBSMEAS_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
/// Each index is visited exactly once; callers write into per-index slots and
/// reduce afterwards in index order, which keeps results deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

template <class T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace obsmeas
