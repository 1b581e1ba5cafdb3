#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qtwist {

/// Worker count used by all data-parallel loops. Defaults to the
/// QTWIST_THREADS environment variable, else hardware concurrency.
unsigned thread_count();
void set_thread_count(unsigned n);  // 0 restores the default

/// Runs body(block_index, begin, end) over [0, count) split into fixed-size
/// blocks. The block layout depends only on `count` and `block_size`, so a
/// caller that reduces per-block partials in block order gets results that
/// are bit-identical for any thread count. The first exception thrown by a
/// block is rethrown on the calling thread.
template <class Body>
void for_each_block(std::size_t count, std::size_t block_size, Body&& body) {
  if (count == 0) return;
  block_size = std::max<std::size_t>(block_size, 1);
  const std::size_t blocks = (count + block_size - 1) / block_size;
  const auto run = [&](std::size_t b) {
    const std::size_t begin = b * block_size;
    body(b, begin, std::min(count, begin + block_size));
  };
  const std::size_t workers = std::min<std::size_t>(thread_count(), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run(b);
    return;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::size_t b;
      {
        std::lock_guard lock(mu);
        if (next >= blocks || failure) return;
        b = next++;
      }
      try {
        run(b);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

/// Convenience wrapper: body(i) for every index, blocked as above.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t block_size = 1024) {
  for_each_block(count, block_size, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

}  // namespace qtwist
