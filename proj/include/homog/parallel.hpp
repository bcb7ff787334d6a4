#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace homog {

// Runs fn(k) for k in [0, count) on at most `jobs` threads. Each index owns
// its output slot, so results do not depend on scheduling. Exceptions are
// collected per index and the first one by index is rethrown.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < workers; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace homog
