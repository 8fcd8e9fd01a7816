#include "lrspgd/alloc_tracker.hpp"

#include <atomic>

namespace lrspgd::alloc_tracker {

namespace {
std::atomic<std::size_t> g_peak{0};
std::atomic<std::uint64_t> g_total{0};
std::atomic<bool> g_linked{false};
}  // namespace

void record(std::size_t bytes) {
  g_total.fetch_add(bytes, std::memory_order_relaxed);
  std::size_t prev = g_peak.load(std::memory_order_relaxed);
  while (bytes > prev &&
         !g_peak.compare_exchange_weak(prev, bytes, std::memory_order_relaxed)) {
  }
}

void reset() {
  g_peak.store(0, std::memory_order_relaxed);
  g_total.store(0, std::memory_order_relaxed);
}

std::size_t peak_single() { return g_peak.load(std::memory_order_relaxed); }

std::uint64_t total_bytes() { return g_total.load(std::memory_order_relaxed); }

bool hooks_linked() { return g_linked.load(std::memory_order_relaxed); }

void detail::mark_hooks_linked() {
  g_linked.store(true, std::memory_order_relaxed);
}

}  // namespace lrspgd::alloc_tracker
