#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace sublab {

/// Runs fn(i) for i in [0, count). Work items write to preassigned slots, so
/// results do not depend on the number of threads. nthreads <= 1 runs inline.
template <typename Fn>
void parallel_for(std::size_t count, int nthreads, Fn&& fn) {
  if (nthreads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(nthreads), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sublab
