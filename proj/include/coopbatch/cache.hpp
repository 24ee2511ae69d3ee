#pragma once

#include <cstdint>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

#include "coopbatch/coop.hpp"
#include "coopbatch/samplers.hpp"

namespace coopbatch {

enum class CacheOutcome { kHit, kMiss };

/// Plain LRU over vertex ids.
class LruCache {
 public:
  explicit LruCache(std::uint64_t capacity);

  CacheOutcome access(VertexId key);

  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t size() const { return recency_.size(); }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  double miss_rate() const {
    const std::uint64_t total = hits_ + misses_;
    return total == 0 ? 0.0 : static_cast<double>(misses_) / static_cast<double>(total);
  }
  void reset_counters() { hits_ = misses_ = 0; }

  /// Resident keys, most recent first.
  std::vector<VertexId> resident() const;

 private:
  std::uint64_t capacity_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::list<VertexId> recency_;  // front = most recent
  std::unordered_map<VertexId, std::list<VertexId>::iterator> index_;
};

inline CacheOutcome lru_access(LruCache& c, VertexId key) { return c.access(key); }

enum class BatchMode { kIndependent, kNested, kSmoothed };

/// How consecutive minibatches relate: independent (fresh randomness each
/// step), nested (kappa sub-batches carved out of one super-batch sharing its
/// epoch seed), or smoothed (per-entity variates interpolated across kappa
/// iterations via the SeedSchedule).
struct MinibatchSchedule {
  BatchMode mode = BatchMode::kIndependent;
  std::uint64_t kappa = 1;  // kKappaInfinity for infinite dependency
  std::uint64_t batch_size = 1024;
};

/// Expand the kappa disjoint b-sized slices of super_seeds, every slice with
/// the super-batch's epoch seed, so each sub-batch expansion is contained in
/// the super-batch expansion layer by layer (verified here) and their input
/// sets union to the super-batch's.
std::vector<LayerStack> nested_batches(const Graph& g,
                                       std::span<const VertexId> super_seeds,
                                       std::uint64_t kappa, std::uint64_t b,
                                       int num_layers, const SamplerConfig& cfg,
                                       std::uint64_t epoch_seed);

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t accesses = 0;
  double miss_rate = 0.0;
  std::uint64_t bytes = 0;
};

/// Feed a sequence of sampled steps through per-PE LRU caches. Each step's
/// accesses are its stacks' input vertices; with a partition map, each PE
/// touches only the input vertices it owns (cooperative feature loading).
/// bytes = misses * dim * bytes_per_scalar.
std::vector<CacheStats> feature_load_sim(
    const std::vector<std::vector<LayerStack>>& steps,
    std::vector<LruCache>& caches, const PartitionMap* pm, std::uint32_t dim,
    std::uint32_t bytes_per_scalar);

struct DependentStepRow {
  std::uint64_t step = 0;
  double miss_rate = 0.0;    // this step only
  std::uint64_t s_l = 0;     // input vertices accessed
  std::uint64_t bytes = 0;
  std::uint64_t fingerprint = 0;  // content hash of the sampled stack
};

struct DependentExperimentResult {
  std::vector<DependentStepRow> rows;
  std::uint64_t warmup_steps = 0;
  std::uint64_t steps_per_epoch = 0;
  double steady_miss_rate = 0.0;  // beyond warmup
};

/// Single-PE dependent-minibatch experiment: a fixed shuffled training order
/// is sliced into batches (the same slices every epoch), each step expands
/// its batch under the schedule and fetches input features through an LRU
/// cache. The first epoch is warmup and excluded from steady_miss_rate.
DependentExperimentResult run_dependent_experiment(
    const Graph& g, const MinibatchSchedule& schedule, std::uint64_t steps,
    std::uint64_t cache_capacity, const SamplerConfig& cfg, int num_layers,
    std::uint32_t feature_dim, std::uint32_t bytes_per_scalar,
    std::uint64_t seed);

}  // namespace coopbatch
