// Deterministic index-parallel loops. Every index owns its own random substream
// and its own output slot, so results do not depend on the thread count.
#pragma once

#include <cstddef>
#include <functional>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

namespace rmkac {

// 0 restores the default (all hardware threads). A positive count may exceed the
// hardware threads.
void set_thread_count(int threads);
int thread_count();

namespace detail {
// runs body inside the arena picked by set_thread_count
void in_arena(const std::function<void()>& body);
}

template <class F>
void parallel_for_index(std::size_t n, F&& f) {
  detail::in_arena([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
      for (std::size_t i = r.begin(); i != r.end(); ++i) f(i);
    });
  });
}

}  // namespace rmkac
