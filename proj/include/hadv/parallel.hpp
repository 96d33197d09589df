#ifndef HADV_PARALLEL_HPP
#define HADV_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hadv {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Splits [0, n) into at most `threads` contiguous chunks and runs
// fn(chunk_index, begin, end) for each, in parallel. Chunk indices are dense
// and ascend with `begin`, so per-chunk outputs concatenated in chunk order
// preserve the global item order for any worker count. The first worker
// exception is rethrown on the calling thread.
inline void run_chunks(
    std::size_t n, int threads,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const int workers = resolve_threads(threads);
  if (n == 0) return;
  const std::size_t chunk_count =
      std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (chunk_count <= 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(chunk_count);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t base = n / chunk_count;
  const std::size_t rem = n % chunk_count;
  std::size_t begin = 0;
  for (std::size_t c = 0; c < chunk_count; ++c) {
    const std::size_t size = base + (c < rem ? 1 : 0);
    const std::size_t end = begin + size;
    pool.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace hadv

#endif  // HADV_PARALLEL_HPP
