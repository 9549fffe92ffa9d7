#pragma once

#include <thread>
#include <vector>

namespace axp {

/// Runs fn(i) for i in [0, count) across `workers` threads with a static
/// block partition. Callers write results into pre-sized slots indexed by i,
/// so the merged output is identical for any worker count.
template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  int used = std::min(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(used));
  for (int w = 0; w < used; ++w) {
    pool.emplace_back([&fn, w, used, count] {
      for (int i = w; i < count; i += used) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace axp
