#pragma once

#include <functional>

namespace trajlab {

/// Runs fn(0..n-1) across up to `threads` workers on contiguous index
/// chunks. Each index must be independent and write only its own slot, which
/// makes results identical for any thread count.
void parallel_for_indexed(int n, int threads, const std::function<void(int)>& fn);

}  // namespace trajlab
