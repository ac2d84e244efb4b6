#include "rmkac/parallel.hpp"

#include <memory>
#include <mutex>

#include <tbb/global_control.h>
#include <tbb/info.h>
#include <tbb/task_arena.h>

namespace rmkac {

namespace {
std::mutex g_mutex;
std::unique_ptr<tbb::global_control> g_control;
// global_control alone caps parallelism but never adds workers beyond the hardware
std::shared_ptr<tbb::task_arena> g_arena;
int g_threads = 0;
}  // namespace

void set_thread_count(int threads) {
  std::lock_guard lock(g_mutex);
  g_arena.reset();
  g_control.reset();
  g_threads = threads;
  if (threads > 0) {
    g_control = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                      static_cast<std::size_t>(threads));
    g_arena = std::make_shared<tbb::task_arena>(threads);
  }
}

namespace detail {

void in_arena(const std::function<void()>& body) {
  std::shared_ptr<tbb::task_arena> arena;
  {
    std::lock_guard lock(g_mutex);
    arena = g_arena;
  }
  if (arena)
    arena->execute(body);
  else
    body();
}

}  // namespace detail

int thread_count() {
  std::lock_guard lock(g_mutex);
  return g_threads > 0 ? g_threads : tbb::info::default_concurrency();
}

}  // namespace rmkac
