#pragma once

#include <cstddef>
#include <functional>

namespace hdlock {

// 0 means std::thread::hardware_concurrency() (at least 1).
std::size_t resolve_threads(std::size_t requested) noexcept;

// Splits [0, n) into contiguous chunks, one per worker; body(begin, end, worker).
// threads == 1 runs inline on the calling thread.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace hdlock
