#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace sigroute {

// 0 means "all hardware threads".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Splits [0, n) into contiguous blocks, one per worker, and calls
// fn(block, begin, end) for each. Blocks are numbered in index order so
// callers can merge per-block results deterministically. The first exception
// thrown by any worker is rethrown after all workers finish.
template <class Fn>
int parallel_blocks(long long n, int threads, Fn&& fn) {
  const int workers = static_cast<int>(std::max<long long>(1, std::min<long long>(resolve_threads(threads), n)));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto run = [&](int b) {
    const long long begin = n * b / workers;
    const long long end = n * (b + 1) / workers;
    try {
      fn(b, begin, end);
    } catch (...) {
      errors[static_cast<std::size_t>(b)] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int b = 0; b < workers; ++b) pool.emplace_back(run, b);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return workers;
}

}  // namespace sigroute
