#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

namespace spinsim {

/// Half-open range of round indices owned by one shard.
struct ShardRange {
  std::uint64_t first;
  std::uint64_t last;
};

inline ShardRange shard_range(std::uint64_t total, int shards, int shard) {
  const auto s = static_cast<unsigned __int128>(shards);
  return {static_cast<std::uint64_t>(total * static_cast<unsigned __int128>(shard) / s),
          static_cast<std::uint64_t>(total * static_cast<unsigned __int128>(shard + 1) / s)};
}

/// Splits [0, total) into `shards` contiguous ranges, runs `body(range, acc)`
/// for each on the OpenMP team, then merges the partial accumulators in shard
/// order. `Acc` must be default-constructible and provide merge(const Acc&).
template <class Acc, class Body>
Acc sharded_reduce(std::uint64_t total, int shards, Body&& body) {
  std::vector<Acc> partial(static_cast<std::size_t>(shards));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(shards));
  const int threads = std::max(1, std::min(shards, omp_get_max_threads()));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int sh = 0; sh < shards; ++sh) {
    const auto i = static_cast<std::size_t>(sh);
    try {
      body(shard_range(total, shards, sh), partial[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Acc out{};
  for (const auto& p : partial) out.merge(p);
  return out;
}

}  // namespace spinsim
