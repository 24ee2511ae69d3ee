#include "coopbatch/cache.hpp"

#include <algorithm>
#include <unordered_set>

namespace coopbatch {

LruCache::LruCache(std::uint64_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InputError("LruCache: capacity must be >= 1");
  index_.reserve(capacity);
}

CacheOutcome LruCache::access(VertexId key) {
  const auto it = index_.find(key);
  if (it != index_.end()) {
    recency_.splice(recency_.begin(), recency_, it->second);
    ++hits_;
    return CacheOutcome::kHit;
  }
  ++misses_;
  if (recency_.size() == capacity_) {
    index_.erase(recency_.back());
    recency_.pop_back();
  }
  recency_.push_front(key);
  index_[key] = recency_.begin();
  return CacheOutcome::kMiss;
}

std::vector<VertexId> LruCache::resident() const {
  return {recency_.begin(), recency_.end()};
}

std::vector<LayerStack> nested_batches(const Graph& g,
                                       std::span<const VertexId> super_seeds,
                                       std::uint64_t kappa, std::uint64_t b,
                                       int num_layers, const SamplerConfig& cfg,
                                       std::uint64_t epoch_seed) {
  if (kappa == 0 || b == 0)
    throw InputError("nested_batches: kappa and b must be >= 1");
  if (super_seeds.size() != kappa * b)
    throw InputError("nested_batches: super batch must hold exactly kappa*b seeds");

  SeedSchedule super_schedule;  // kappa 1: plain stream under z1
  super_schedule.z1 = super_schedule.z2 = epoch_seed;
  const LayerStack super = expand(g, super_seeds, num_layers, cfg, super_schedule);

  std::vector<LayerStack> stacks;
  stacks.reserve(kappa);
  for (std::uint64_t i = 0; i < kappa; ++i) {
    const std::span<const VertexId> sub = super_seeds.subspan(i * b, b);
    stacks.push_back(expand(g, sub, num_layers, cfg, super_schedule));
  }

  // Shared epoch seed forces layerwise containment in the super batch.
  for (int l = 0; l < num_layers; ++l) {
    std::unordered_set<VertexId> super_srcs(super.blocks[l].src_vertices.begin(),
                                            super.blocks[l].src_vertices.end());
    for (const auto& stack : stacks)
      for (const VertexId v : stack.blocks[l].src_vertices)
        if (!super_srcs.count(v))
          throw InputError("nested_batches: containment violated at layer " +
                           std::to_string(l));
  }
  return stacks;
}

namespace {

/// Deterministic per-step access order. Input lists are id-sorted; feeding an
/// LRU a repeated ascending scan of a working set larger than the cache would
/// evict every entry right before its reuse. Real feature gathers are not
/// globally ordered, so the simulator hashes ids into a step-dependent order.
std::vector<VertexId> access_order(const std::vector<VertexId>& ids,
                                   std::uint64_t key) {
  std::vector<std::pair<std::uint64_t, VertexId>> keyed;
  keyed.reserve(ids.size());
  for (const VertexId v : ids) keyed.push_back({mix64(v ^ key), v});
  std::sort(keyed.begin(), keyed.end());
  std::vector<VertexId> out;
  out.reserve(ids.size());
  for (const auto& [h, v] : keyed) out.push_back(v);
  return out;
}

}  // namespace

std::vector<CacheStats> feature_load_sim(
    const std::vector<std::vector<LayerStack>>& steps,
    std::vector<LruCache>& caches, const PartitionMap* pm, std::uint32_t dim,
    std::uint32_t bytes_per_scalar) {
  const std::size_t parts = caches.size();
  for (const auto& step : steps)
    if (step.size() != parts)
      throw InputError("feature_load_sim: stack/cache count mismatch");

  std::vector<CacheStats> stats(parts);
  std::uint64_t step_index = 0;
  for (const auto& step : steps) {
    ++step_index;
    for (std::size_t p = 0; p < parts; ++p) {
      const auto ordered =
          access_order(step[p].input_vertices(), hash_bits(step_index, {p}));
      for (const VertexId v : ordered) {
        if (pm && pm->owner[v] != p) continue;  // cooperative: owned rows only
        ++stats[p].accesses;
        if (caches[p].access(v) == CacheOutcome::kMiss) ++stats[p].misses;
        else ++stats[p].hits;
      }
    }
  }
  for (auto& s : stats) {
    s.miss_rate = s.accesses == 0
                      ? 0.0
                      : static_cast<double>(s.misses) / static_cast<double>(s.accesses);
    s.bytes = s.misses * static_cast<std::uint64_t>(dim) * bytes_per_scalar;
  }
  return stats;
}

namespace {

std::uint64_t stack_fingerprint(const LayerStack& stack) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& b : stack.blocks) {
    h = mix64(h ^ static_cast<std::uint64_t>(b.layer));
    for (const VertexId v : b.dst_vertices) h = mix64(h ^ v);
    for (const VertexId v : b.src_vertices) h = mix64(h ^ (0x100000000ULL | v));
    for (const auto& [si, di] : b.edges)
      h = mix64(h ^ ((static_cast<std::uint64_t>(si) << 32) | di));
  }
  return h;
}

}  // namespace

DependentExperimentResult run_dependent_experiment(
    const Graph& g, const MinibatchSchedule& schedule, std::uint64_t steps,
    std::uint64_t cache_capacity, const SamplerConfig& cfg, int num_layers,
    std::uint32_t feature_dim, std::uint32_t bytes_per_scalar,
    std::uint64_t seed) {
  const std::uint64_t n = g.num_vertices;
  const std::uint64_t b = std::min<std::uint64_t>(schedule.batch_size, n);
  if (b == 0) throw InputError("run_dependent_experiment: empty batches");

  // Fixed training order, identical every epoch: deterministic Fisher-Yates.
  std::vector<VertexId> order(n);
  for (std::uint64_t v = 0; v < n; ++v) order[v] = static_cast<VertexId>(v);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = static_cast<std::uint64_t>(
        hash_uniform(seed, {kStreamSeedDraw, i}) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  const std::uint64_t steps_per_epoch = std::max<std::uint64_t>(1, n / b);

  SeedSchedule seeds = SeedSchedule::make(
      schedule.mode == BatchMode::kNested ? 1 : schedule.kappa, seed);

  LruCache cache(cache_capacity);
  DependentExperimentResult result;
  result.steps_per_epoch = steps_per_epoch;
  result.warmup_steps = std::min(steps_per_epoch, steps / 2);
  result.rows.reserve(steps);

  std::uint64_t steady_hits = 0, steady_misses = 0;
  for (std::uint64_t step = 0; step < steps; ++step) {
    const std::uint64_t slot = (step % steps_per_epoch) * b;
    const std::span<const VertexId> batch(order.data() + slot, b);

    LayerStack stack;
    if (schedule.mode == BatchMode::kNested) {
      // Groups of kappa consecutive batches share one epoch seed.
      const std::uint64_t group =
          schedule.kappa == kKappaInfinity ? 0 : step / schedule.kappa;
      SeedSchedule group_schedule;
      group_schedule.z1 = group_schedule.z2 = hash_bits(seed, {kStreamFresh, group});
      stack = expand(g, batch, num_layers, cfg, group_schedule);
    } else {
      stack = expand(g, batch, num_layers, cfg, seeds);
      seeds = schedule_advance(seeds);
    }

    DependentStepRow row;
    row.step = step;
    row.fingerprint = stack_fingerprint(stack);
    const auto inputs =
        access_order(stack.input_vertices(), hash_bits(seed, {step, 0xACCE55}));
    row.s_l = inputs.size();
    std::uint64_t miss = 0;
    for (const VertexId v : inputs)
      if (cache.access(v) == CacheOutcome::kMiss) ++miss;
    row.miss_rate = inputs.empty()
                        ? 0.0
                        : static_cast<double>(miss) / static_cast<double>(inputs.size());
    row.bytes = miss * static_cast<std::uint64_t>(feature_dim) * bytes_per_scalar;
    if (step >= result.warmup_steps) {
      steady_misses += miss;
      steady_hits += inputs.size() - miss;
    }
    result.rows.push_back(row);
  }
  const std::uint64_t steady_total = steady_hits + steady_misses;
  result.steady_miss_rate =
      steady_total == 0 ? 0.0
                        : static_cast<double>(steady_misses) /
                              static_cast<double>(steady_total);
  return result;
}

}  // namespace coopbatch
