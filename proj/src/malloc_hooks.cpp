// Heap instrumentation for the memory-claim harness. Targets that want it
// compile this file and link with
//   -Wl,--wrap=malloc -Wl,--wrap=calloc -Wl,--wrap=realloc
// which reroutes every malloc compiled into the binary (including Eigen's
// aligned allocator) through the tracker.

#include "lrspgd/alloc_tracker.hpp"

#include <cstddef>
#include <new>

extern "C" {
void* __real_malloc(std::size_t size);
void* __real_calloc(std::size_t count, std::size_t size);
void* __real_realloc(void* ptr, std::size_t size);

void* __wrap_malloc(std::size_t size) {
  lrspgd::alloc_tracker::record(size);
  return __real_malloc(size);
}

void* __wrap_calloc(std::size_t count, std::size_t size) {
  lrspgd::alloc_tracker::record(count * size);
  return __real_calloc(count, size);
}

void* __wrap_realloc(void* ptr, std::size_t size) {
  lrspgd::alloc_tracker::record(size);
  return __real_realloc(ptr, size);
}
}  // extern "C"

// Route operator new through the wrapped malloc so container allocations in
// this binary are counted too. Matching frees go to the regular free().
void* operator new(std::size_t size) {
  if (void* p = __wrap_malloc(size ? size : 1)) return p;
  throw std::bad_alloc();
}

void* operator new[](std::size_t size) { return operator new(size); }

namespace {
struct HookMarker {
  HookMarker() { lrspgd::alloc_tracker::detail::mark_hooks_linked(); }
};
HookMarker g_marker;
}  // namespace
