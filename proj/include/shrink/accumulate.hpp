#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "shrink/rng.hpp"

namespace shrink {

/// Streaming first/second moments (Welford update, Chan merge).
/// Merging partials in a fixed order keeps many-term sums of near-cancelling
/// values stable and makes parallel reductions reproducible.
struct MomentAccumulator {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations from the running mean

  void add(double x) noexcept {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const MomentAccumulator& other) noexcept {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double d = other.mean - mean;
    const double n = na + nb;
    mean += d * (nb / n);
    m2 += other.m2 + d * d * (na * nb / n);
    count += other.count;
  }

  double variance() const noexcept { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }

  /// Standard error of the sample mean.
  double stderr_mean() const noexcept {
    if (count < 2) return 0.0;
    const double v = variance();
    return v > 0.0 ? std::sqrt(v / static_cast<double>(count)) : 0.0;
  }
};

/// Accumulates one double statistic per sample over n samples.
///
/// Samples are partitioned into fixed chunks of kChunkSamples; chunk c draws
/// from ChunkRng(key, c).  Threads claim chunks dynamically but partial
/// results are merged in chunk order, so the result is identical for any
/// worker count.  `make_worker()` builds one stateful callable per thread;
/// `worker(rng, k)` returns the statistic of one sample.
template <class WorkerFactory>
MomentAccumulator parallel_accumulate(std::uint64_t n, RngKey key, WorkerFactory make_worker,
                                      int threads = 0) {
  const std::uint64_t n_chunks = (n + kChunkSamples - 1) / kChunkSamples;
  if (threads <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    threads = hc > 0 ? static_cast<int>(hc) : 1;
  }
  if (n_chunks < static_cast<std::uint64_t>(threads)) threads = static_cast<int>(n_chunks);
  if (threads < 1) threads = 1;

  std::vector<MomentAccumulator> partial(n_chunks);
  auto run = [&](auto& worker, std::uint64_t c) {
    ChunkRng rng(key, c);
    const std::uint64_t begin = c * kChunkSamples;
    const std::uint64_t end = begin + kChunkSamples < n ? begin + kChunkSamples : n;
    MomentAccumulator acc;
    for (std::uint64_t k = begin; k < end; ++k) acc.add(worker(rng, k));
    partial[c] = acc;
  };

  if (threads == 1) {
    auto worker = make_worker();
    for (std::uint64_t c = 0; c < n_chunks; ++c) run(worker, c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        auto worker = make_worker();
        for (std::uint64_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
          run(worker, c);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  MomentAccumulator total;
  for (const auto& part : partial) total.merge(part);
  return total;
}

}  // namespace shrink
