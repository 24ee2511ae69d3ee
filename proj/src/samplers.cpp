#include "coopbatch/samplers.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace coopbatch {

namespace {

void check_seeds(const Graph& g, std::span<const VertexId> seeds) {
  for (const VertexId s : seeds) g.check_vertex(s);
}

/// Collects (neighbor, dst_index) pairs and finalizes the block layout:
/// src_vertices = sorted dedup of dst list + sampled neighbors.
class BlockBuilder {
 public:
  BlockBuilder(std::span<const VertexId> seeds, int layer) : layer_(layer) {
    dst_.assign(seeds.begin(), seeds.end());
    sampled_.reserve(seeds.size() * 8);
  }

  void add(VertexId neighbor, std::uint32_t dst_index) {
    sampled_.push_back({neighbor, dst_index});
  }

  BipartiteBlock finish() {
    BipartiteBlock block;
    block.layer = layer_;
    block.dst_vertices = std::move(dst_);

    std::vector<VertexId> src(block.dst_vertices);
    src.reserve(src.size() + sampled_.size());
    for (const auto& [t, di] : sampled_) src.push_back(t);
    std::sort(src.begin(), src.end());
    src.erase(std::unique(src.begin(), src.end()), src.end());

    auto src_index = [&src](VertexId v) {
      return static_cast<std::uint32_t>(
          std::lower_bound(src.begin(), src.end(), v) - src.begin());
    };

    block.edges.reserve(sampled_.size());
    for (const auto& [t, di] : sampled_)
      block.edges.push_back({src_index(t), di});

    block.dst_pos_in_src.reserve(block.dst_vertices.size());
    for (const VertexId d : block.dst_vertices)
      block.dst_pos_in_src.push_back(src_index(d));

    block.src_vertices = std::move(src);
    return block;
  }

 private:
  int layer_;
  std::vector<VertexId> dst_;
  std::vector<std::pair<VertexId, std::uint32_t>> sampled_;
};

BipartiteBlock ns_block(const Graph& g, std::span<const VertexId> seeds,
                        std::uint32_t k, const VariateSource& src, int layer) {
  BlockBuilder builder(seeds, layer);
  const std::uint64_t lid = static_cast<std::uint64_t>(layer);
  std::vector<std::uint64_t> slots(k);
  for (std::uint32_t di = 0; di < seeds.size(); ++di) {
    const VertexId s = seeds[di];
    const auto ns = g.neighbors(s);
    const std::uint64_t d = ns.size();
    if (d <= k) {
      for (const VertexId t : ns) builder.add(t, di);
      continue;
    }
    // Reservoir over edge positions: roll r in [0, i] for the i-th edge,
    // replace slot r if r < k. Keyed by (layer, s, i) only.
    const VariatePrefix pfx = src.prefix({kStreamNs, lid, s});
    for (std::uint32_t j = 0; j < k; ++j) slots[j] = j;
    for (std::uint64_t i = k; i < d; ++i) {
      const double u = src.uniform_tail1(pfx, i);
      const auto r = static_cast<std::uint64_t>(u * static_cast<double>(i + 1));
      if (r < k) slots[r] = i;
    }
    for (std::uint32_t j = 0; j < k; ++j) builder.add(ns[slots[j]], di);
  }
  return builder.finish();
}

BipartiteBlock labor_block(const Graph& g, std::span<const VertexId> seeds,
                           std::uint32_t k,
                           const std::function<double(VertexId)>& variate,
                           int layer) {
  BlockBuilder builder(seeds, layer);
  for (std::uint32_t di = 0; di < seeds.size(); ++di) {
    const VertexId s = seeds[di];
    const auto ns = g.neighbors(s);
    if (ns.empty()) continue;
    const double threshold =
        static_cast<double>(k) / static_cast<double>(ns.size());
    for (const VertexId t : ns)
      if (variate(t) <= threshold) builder.add(t, di);
  }
  return builder.finish();
}

/// LABOR-0 with stream-derived variates; smoothed draws are memoized since
/// the interpolation path costs two normal inversions per vertex.
BipartiteBlock labor_block_stream(const Graph& g, std::span<const VertexId> seeds,
                                  std::uint32_t k, const VariateSource& src,
                                  int layer) {
  BlockBuilder builder(seeds, layer);
  const VariatePrefix pfx =
      src.prefix({kStreamLabor, static_cast<std::uint64_t>(layer)});
  std::unordered_map<VertexId, double> memo;
  if (src.smoothed) memo.reserve(seeds.size() * 8);

  for (std::uint32_t di = 0; di < seeds.size(); ++di) {
    const VertexId s = seeds[di];
    const auto ns = g.neighbors(s);
    if (ns.empty()) continue;
    const double threshold =
        static_cast<double>(k) / static_cast<double>(ns.size());
    for (const VertexId t : ns) {
      double r;
      if (src.smoothed) {
        auto it = memo.find(t);
        if (it == memo.end()) it = memo.emplace(t, src.uniform_tail1(pfx, t)).first;
        r = it->second;
      } else {
        r = src.uniform_tail1(pfx, t);
      }
      if (r <= threshold) builder.add(t, di);
    }
  }
  return builder.finish();
}

/// Weight-proportional pick from N(v); uniform when the graph is unweighted.
VertexId pick_neighbor(const Graph& g, VertexId v, double u,
                       std::unordered_map<VertexId, std::vector<double>>& cdf_cache) {
  const auto ns = g.neighbors(v);
  if (!g.has_weights()) {
    auto i = static_cast<std::size_t>(u * static_cast<double>(ns.size()));
    if (i >= ns.size()) i = ns.size() - 1;
    return ns[i];
  }
  auto it = cdf_cache.find(v);
  if (it == cdf_cache.end()) {
    const auto ws = g.neighbor_weights(v);
    std::vector<double> cdf(ws.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      acc += ws[i];
      cdf[i] = acc;
    }
    it = cdf_cache.emplace(v, std::move(cdf)).first;
  }
  const auto& cdf = it->second;
  const double x = u * cdf.back();
  auto i = static_cast<std::size_t>(
      std::upper_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
  if (i >= ns.size()) i = ns.size() - 1;
  return ns[i];
}

/// Reusable visit counter: stamped open-addressing table, cleared by bumping
/// the generation stamp instead of touching every slot.
class VisitCounter {
 public:
  explicit VisitCounter(std::size_t max_entries) {
    std::size_t cap = 64;
    while (cap < max_entries * 4) cap <<= 1;
    mask_ = cap - 1;
    slots_.resize(cap);
  }

  void clear() {
    ++stamp_;
    distinct_.clear();
  }

  void add(VertexId v) {
    std::size_t h = (static_cast<std::size_t>(v) * 0x9e3779b9u) & mask_;
    while (slots_[h].stamp == stamp_ && slots_[h].key != v) h = (h + 1) & mask_;
    if (slots_[h].stamp != stamp_) {
      slots_[h] = {v, 0, stamp_};
      distinct_.push_back(h);
    }
    slots_[h].count += 1;
  }

  /// (count, id) per distinct visited vertex, unspecified order.
  std::vector<std::pair<std::uint64_t, VertexId>> tally() const {
    std::vector<std::pair<std::uint64_t, VertexId>> out;
    out.reserve(distinct_.size());
    for (const std::size_t h : distinct_)
      out.push_back({slots_[h].count, slots_[h].key});
    return out;
  }

 private:
  struct Slot {
    VertexId key = 0;
    std::uint32_t count = 0;
    std::uint32_t stamp = 0;
  };
  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
  std::uint32_t stamp_ = 0;
  std::vector<std::size_t> distinct_;
};

BipartiteBlock rw_block(const Graph& g, std::span<const VertexId> seeds,
                        const SamplerConfig& cfg, const VariateSource& src,
                        int layer) {
  BlockBuilder builder(seeds, layer);
  const std::uint64_t lid = static_cast<std::uint64_t>(layer);
  const double p = cfg.rw_restart;
  std::unordered_map<VertexId, std::vector<double>> cdf_cache;
  VisitCounter visits(static_cast<std::size_t>(cfg.rw_walks) * cfg.rw_length);

  const std::uint64_t* indptr = g.indptr.data();
  const VertexId* indices = g.indices.data();
  const bool weighted = g.has_weights();
  std::vector<VertexId> cur(cfg.rw_walks);
  std::vector<std::uint8_t> alive(cfg.rw_walks);

  for (std::uint32_t di = 0; di < seeds.size(); ++di) {
    const VertexId s = seeds[di];
    const VariatePrefix pfx = src.prefix({kStreamRwStep, lid, s});
    visits.clear();
    std::fill(cur.begin(), cur.end(), s);
    std::fill(alive.begin(), alive.end(), 1);
    // Round-major order: every walk advances one step per round, so the
    // random row lookups of independent walks overlap in the memory system.
    // Draws are keyed by (walk, step); the result is the same as running
    // each walk to completion.
    for (std::uint64_t j = 0; j < cfg.rw_length; ++j) {
      for (std::uint64_t w = 0; w < cfg.rw_walks; ++w) {
        if (!alive[w]) continue;
        // One draw per step: the restart coin takes the [0,p) slice and the
        // neighbor choice reuses the conditionally uniform remainder.
        double u = src.uniform_tail2(pfx, w, j);
        VertexId from = cur[w];
        if (j > 0 && p > 0.0) {
          if (u < p) {
            from = s;  // restart: draw from the seed's neighborhood
            u = u / p;
          } else {
            u = (u - p) / (1.0 - p);
          }
        }
        const std::uint64_t beg = indptr[from];
        const std::uint64_t d = indptr[from + 1] - beg;
        if (d == 0) {  // dead end terminates the walk
          alive[w] = 0;
          continue;
        }
        VertexId next;
        if (weighted) {
          next = pick_neighbor(g, from, u, cdf_cache);
        } else {
          auto idx = static_cast<std::uint64_t>(u * static_cast<double>(d));
          if (idx >= d) idx = d - 1;
          next = indices[beg + idx];
        }
        if (next != s) visits.add(next);
        cur[w] = next;
      }
    }
    // Top-k by visit count, ties to the smaller vertex id.
    auto ranked = visits.tally();
    const auto by_count = [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    };
    const std::size_t take = std::min<std::size_t>(cfg.fanout, ranked.size());
    if (take < ranked.size())
      std::nth_element(ranked.begin(), ranked.begin() + take, ranked.end(),
                       by_count);
    std::sort(ranked.begin(), ranked.begin() + take, by_count);
    for (std::size_t i = 0; i < take; ++i) builder.add(ranked[i].second, di);
  }
  return builder.finish();
}

}  // namespace

BipartiteBlock sample_full(const Graph& g, std::span<const VertexId> seeds,
                           int layer) {
  check_seeds(g, seeds);
  BlockBuilder builder(seeds, layer);
  for (std::uint32_t di = 0; di < seeds.size(); ++di)
    for (const VertexId t : g.neighbors(seeds[di])) builder.add(t, di);
  return builder.finish();
}

BipartiteBlock sample_ns(const Graph& g, std::span<const VertexId> seeds,
                         std::uint32_t k, std::uint64_t epoch_seed, int layer) {
  check_seeds(g, seeds);
  if (k == 0) throw InputError("sample_ns: fanout must be >= 1");
  return ns_block(g, seeds, k, VariateSource::plain(epoch_seed), layer);
}

BipartiteBlock sample_labor0(const Graph& g, std::span<const VertexId> seeds,
                             std::uint32_t k,
                             const std::function<double(VertexId)>& variate,
                             int layer) {
  check_seeds(g, seeds);
  if (k == 0) throw InputError("sample_labor0: fanout must be >= 1");
  return labor_block(g, seeds, k, variate, layer);
}

BipartiteBlock sample_rw(const Graph& g, std::span<const VertexId> seeds,
                         const SamplerConfig& cfg, std::uint64_t epoch_seed,
                         int layer) {
  check_seeds(g, seeds);
  if (cfg.rw_length < 1 || cfg.rw_walks < 1)
    throw InputError("sample_rw: rw_length and rw_walks must be >= 1");
  return rw_block(g, seeds, cfg, VariateSource::plain(epoch_seed), layer);
}

BipartiteBlock sample_block(const Graph& g, std::span<const VertexId> seeds,
                            const SamplerConfig& cfg,
                            const VariateSource& source, int layer) {
  check_seeds(g, seeds);
  switch (cfg.kind) {
    case SamplerKind::kFull:
      return sample_full(g, seeds, layer);
    case SamplerKind::kNs:
      return ns_block(g, seeds, cfg.fanout, source, layer);
    case SamplerKind::kLabor0:
      return labor_block_stream(g, seeds, cfg.fanout, source, layer);
    case SamplerKind::kRw:
      return rw_block(g, seeds, cfg, source, layer);
  }
  throw InputError("sample_block: unknown sampler kind");
}

LayerStack expand(const Graph& g, std::span<const VertexId> seeds,
                  int num_layers, const SamplerConfig& cfg,
                  const SeedSchedule& schedule) {
  if (num_layers < 1) throw InputError("expand: num_layers must be >= 1");
  const VariateSource source = VariateSource::from_schedule(schedule);

  LayerStack stack;
  stack.blocks.reserve(num_layers);
  std::vector<VertexId> cur(seeds.begin(), seeds.end());
  for (int l = 0; l < num_layers; ++l) {
    stack.blocks.push_back(sample_block(g, cur, cfg, source, l));
    cur = stack.blocks.back().src_vertices;
  }
  return stack;
}

std::vector<VertexId> edge_pred_seeds(
    const Graph& g, std::span<const std::pair<VertexId, VertexId>> edge_batch,
    std::uint64_t epoch_seed) {
  std::vector<VertexId> out;
  std::unordered_set<VertexId> seen;
  auto push = [&](VertexId v) {
    if (seen.insert(v).second) out.push_back(v);
  };

  std::unordered_set<VertexId> blocked;
  for (const auto& [u, v] : edge_batch) {
    g.check_vertex(u);
    g.check_vertex(v);
    push(u);
    push(v);

    const double coin = hash_uniform(epoch_seed, {kStreamEdgeCoin, u, v});
    const VertexId shared = coin < 0.5 ? u : v;
    blocked.clear();
    blocked.insert(shared);
    for (const VertexId t : g.neighbors(shared)) blocked.insert(t);

    bool found = false;
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
      const double r = hash_uniform(epoch_seed, {kStreamEdgeNeg, u, v, attempt});
      auto w = static_cast<VertexId>(r * static_cast<double>(g.num_vertices));
      if (w >= g.num_vertices) w = static_cast<VertexId>(g.num_vertices - 1);
      if (blocked.count(w)) continue;
      push(w);
      found = true;
      break;
    }
    if (!found)
      throw InputError("edge_pred_seeds: no negative endpoint found for vertex " +
                       std::to_string(shared) + " after 100 attempts");
  }
  return out;
}

}  // namespace coopbatch
