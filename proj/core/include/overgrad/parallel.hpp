#pragma once

#include <cstddef>
#include <functional>

namespace overgrad {

/// Worker count used by internal loops. 0 means hardware concurrency.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

/// Runs body(lo, hi) over a static partition of [begin, end).
///
/// Callers must make each output cell depend on exactly one index, so the
/// result is independent of the thread count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1);

}  // namespace overgrad
