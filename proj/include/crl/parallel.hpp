#pragma once

#include <cstddef>
#include <functional>

namespace crl {

/// Worker count used by range-split reductions. Results never depend on it: chunk boundaries are
/// fixed and partial results are combined in chunk order.
unsigned thread_count();
void set_thread_count(unsigned threads);

/// Calls body(chunk) for chunk in [0, chunks), spread over thread_count() workers.
void parallel_chunks(std::size_t chunks, const std::function<void(std::size_t)>& body);

}  // namespace crl
