#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wgapdc {

/// Splits [0, count) into fixed chunks, runs `work(begin, end, partial)` on a
/// pool of threads, then folds the partials with `merge(total, partial)` in
/// chunk order. The chunk size alone fixes the reduction order, so results are
/// bitwise identical for any thread count.
template <class Partial, class MakePartial, class Work, class Merge>
Partial chunked_reduce(std::size_t count, std::size_t chunk, MakePartial make_partial, Work work, Merge merge,
                       unsigned threads = 0) {
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (count + chunk - 1) / chunk;
  std::vector<Partial> partials;
  partials.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) partials.push_back(make_partial());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(chunks, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        work(c * chunk, std::min(count, (c + 1) * chunk), partials[c]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };
  if (threads <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Partial total = make_partial();
  for (auto& p : partials) merge(total, p);
  return total;
}

}  // namespace wgapdc
