#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <thread>
#include <vector>

namespace ddcc {

/// Splits `total` draws into chunks of `chunk` and sums
/// `count(chunk_index, chunk_draws)` over them, optionally on several
/// threads. Each chunk must seed its own generator from its index, which
/// makes the sum independent of `workers`.
template <class CountChunk>
std::uint64_t sum_over_chunks(std::uint64_t total, std::uint64_t chunk, unsigned workers,
                              CountChunk&& count) {
  const std::uint64_t chunks = (total + chunk - 1) / chunk;
  const auto size_of = [&](std::uint64_t c) { return std::min(chunk, total - c * chunk); };
  workers = std::max(1u, static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks)));
  if (workers == 1) {
    std::uint64_t sum = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) sum += count(c, size_of(c));
    return sum;
  }
  std::vector<std::uint64_t> partial(workers, 0);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (std::uint64_t c = t; c < chunks; c += workers) partial[t] += count(c, size_of(c));
    });
  }
  for (auto& th : pool) th.join();
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

}  // namespace ddcc
