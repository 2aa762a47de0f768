#pragma once

#include <cstddef>
#include <functional>

namespace equilens {

// Runs body(i) for i in [0, count) on up to `threads` workers using static
// contiguous chunks. Each index must write only its own output slot, which
// makes the result independent of the thread count. Exceptions thrown by
// the body are rethrown on the calling thread (the first one wins).
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace equilens
