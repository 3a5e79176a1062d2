#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace pfclust::detail {

// Splits [0, count) into contiguous blocks and runs fn(begin, end) on each.
// Blocks write disjoint outputs, so results do not depend on the schedule.
template <typename Fn>
void parallel_blocks(std::size_t count, Fn&& fn, std::size_t min_block = 64) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, std::max<std::size_t>(1, count / min_block));
  if (workers <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t step = (count + workers - 1) / workers;
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t begin = 0; begin < count; begin += step) {
    const std::size_t end = std::min(count, begin + step);
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

}  // namespace pfclust::detail
