#pragma once

// Deterministic data parallelism. Work is cut into fixed-size blocks whose
// layout does not depend on the thread count, and reductions combine block
// partials in block order, so results are bit-identical for any `threads`.

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace rcm {

inline constexpr std::size_t kReductionBlock = 4096;

/// Calls body(begin, end) on contiguous chunks of [0, n). Ranges shorter
/// than `grain` run inline.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body, std::size_t grain = 2 * kReductionBlock) {
  const std::size_t workers = std::max<std::size_t>(1, static_cast<std::size_t>(threads));
  if (workers == 1 || n < grain) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

/// Σ_i term(i) over [0, n), summed per fixed block and then across blocks.
template <class Term>
double blocked_sum(std::size_t n, int threads, Term&& term) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, threads, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t lo = b * kReductionBlock;
      const std::size_t hi = std::min(n, lo + kReductionBlock);
      double acc = 0.0;
      for (std::size_t i = lo; i < hi; ++i) acc += term(i);
      partial[b] = acc;
    }
  }, 2);
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace rcm
