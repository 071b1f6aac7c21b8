#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace curvkit {

// Worker count: CURVKIT_THREADS when set, else the hardware concurrency,
// capped by set_thread_cap.
int thread_count();
void set_thread_cap(int threads);

inline constexpr std::size_t kChunkSize = 512;

// Runs body(begin, end) over fixed chunks of [0, count). Chunk boundaries do
// not depend on the thread count. The first exception is rethrown.
void parallel_chunks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

// Sum of `width`-component values; term(i, out) writes item i's values.
// Per-chunk partial sums and a pairwise reduction over chunks give
// results that are bit-identical for every thread count.
std::vector<double> parallel_sum(std::size_t count, int width,
                                 const std::function<void(std::size_t, std::span<double>)>& term);

// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> v);

}  // namespace curvkit
