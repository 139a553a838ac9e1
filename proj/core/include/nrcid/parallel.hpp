#ifndef NRCID_PARALLEL_HPP
#define NRCID_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace nrcid {

// Number of hardware threads, never 0.
unsigned available_parallelism();

// Runs body(0..count-1) across up to `threads` workers (0 = available
// parallelism). Indices are claimed from a shared counter; callers must make
// each index write only to its own output slot so results are independent of
// scheduling. Exceptions from body are captured and rethrown on the caller.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace nrcid

#endif
