#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace accmarket {

/// Worker count: hardware concurrency, capped by ACCMARKET_THREADS when set.
std::size_t worker_count();

/// Calls fn(i) for i in [0, count) across worker threads. The first exception is rethrown
/// after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// results[i] = fn(i); output order is independent of scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn fn) {
  std::vector<T> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace accmarket
