#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace visclim::detail {

/// Runs fn(begin, end) over a partition of [0, n). Work is split into
/// contiguous chunks, one per worker. Results must be written to disjoint
/// memory; the partition itself never influences values, so output is
/// bit-identical for any thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  if (threads <= 1 || n < 2 * threads) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = begin + chunk < n ? begin + chunk : n;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

/// Pairwise (tree-ordered) sum. The reduction order depends only on n, never
/// on threading, so repeated evaluations are bit-identical.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace visclim::detail
