#ifndef EMBEVAL_PARALLEL_HPP
#define EMBEVAL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace embeval {

/// Runs body(i) for i in [0, n) on up to `threads` workers using contiguous
/// blocks. Callers write to disjoint slots, so results do not depend on the
/// thread count. threads == 0 means hardware concurrency. The first
/// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

unsigned resolve_threads(unsigned threads) noexcept;

}  // namespace embeval

#endif  // EMBEVAL_PARALLEL_HPP
