#include "curvkit/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace curvkit {

namespace {

std::atomic<int> g_cap{0};

int env_threads() {
  if (const char* s = std::getenv("CURVKIT_THREADS")) {
    const int v = std::atoi(s);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int thread_count() {
  const int base = env_threads();
  const int cap = g_cap.load();
  return cap > 0 ? std::min(base, cap) : base;
}

void set_thread_cap(int threads) { g_cap.store(std::max(0, threads)); }

void parallel_chunks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  const int workers = static_cast<int>(std::min<std::size_t>(thread_count(), chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c * kChunkSize, std::min(count, (c + 1) * kChunkSize));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    while (true) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        body(c * kChunkSize, std::min(count, (c + 1) * kChunkSize));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

std::vector<double> parallel_sum(std::size_t count, int width,
                                 const std::function<void(std::size_t, std::span<double>)>& term) {
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  // partial[c * width + k]
  std::vector<double> partial(chunks * width, 0.0);
  parallel_chunks(count, [&](std::size_t begin, std::size_t end) {
    const std::size_t c = begin / kChunkSize;
    std::vector<double> values((end - begin) * width);
    for (std::size_t i = begin; i < end; ++i) term(i, std::span<double>(values.data() + (i - begin) * width, width));
    std::vector<double> column(end - begin);
    for (int k = 0; k < width; ++k) {
      for (std::size_t i = 0; i < end - begin; ++i) column[i] = values[i * width + k];
      partial[c * width + k] = pairwise_sum(column);
    }
  });
  std::vector<double> out(width);
  std::vector<double> column(chunks);
  for (int k = 0; k < width; ++k) {
    for (std::size_t c = 0; c < chunks; ++c) column[c] = partial[c * width + k];
    out[k] = pairwise_sum(column);
  }
  return out;
}

}  // namespace curvkit
