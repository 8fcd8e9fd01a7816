#pragma once

#include <cstddef>
#include <cstdint>

namespace lrspgd::alloc_tracker {

/// Records one heap allocation. Called by the malloc wrap hooks; a no-op
/// burden of two relaxed atomics otherwise.
void record(std::size_t bytes);

void reset();

/// Largest single allocation observed since reset().
std::size_t peak_single();

/// Total bytes requested since reset().
std::uint64_t total_bytes();

/// True when the wrap hooks are linked into this binary, i.e. the numbers
/// above actually mean something.
bool hooks_linked();

namespace detail {
void mark_hooks_linked();
}

}  // namespace lrspgd::alloc_tracker
