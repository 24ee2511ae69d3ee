#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "coopbatch/graph.hpp"
#include "coopbatch/rng.hpp"

namespace coopbatch {

enum class SamplerKind { kFull, kNs, kLabor0, kRw };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::kNs;
  std::uint32_t fanout = 10;   // k
  std::uint32_t rw_length = 3; // o
  double rw_restart = 0.5;     // p
  std::uint32_t rw_walks = 100; // a
};

/// One sampled layer: a bipartite graph from src_vertices to dst_vertices.
/// dst_vertices are the layer's seeds; src_vertices is the sorted dedup of
/// dst_vertices plus every sampled in-neighbor, so each destination also
/// appears on the source side. Edge endpoints index into the two lists,
/// grouped by destination in dst order.
struct BipartiteBlock {
  std::vector<VertexId> dst_vertices;
  std::vector<VertexId> src_vertices;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (src_idx, dst_idx)
  std::vector<std::uint32_t> dst_pos_in_src;
  int layer = 0;

  std::uint64_t num_edges() const { return edges.size(); }
};

/// Blocks ordered from the seeds outward; in single-worker expansion
/// blocks[l].src_vertices == blocks[l+1].dst_vertices.
struct LayerStack {
  std::vector<BipartiteBlock> blocks;

  /// Input-feature vertices: the outermost source list (seeds if empty).
  const std::vector<VertexId>& input_vertices() const {
    return blocks.back().src_vertices;
  }
};

/// Partially folded hash state shared by one entity's draws (h2 only
/// meaningful in smoothed mode).
struct VariatePrefix {
  std::uint64_t h1 = 0;
  std::uint64_t h2 = 0;
};

/// Uniform-variate streams for the samplers. Plain mode hashes with one
/// epoch seed; smoothed mode interpolates between two seeds (contribution c)
/// so that consecutive iterations see slowly drifting variates.
struct VariateSource {
  std::uint64_t z1 = 0;
  std::uint64_t z2 = 0;
  double c = 0.0;
  bool smoothed = false;
  double cos_c = 1.0;  // cos(c*pi/2), exact at the endpoints
  double sin_c = 0.0;

  static VariateSource plain(std::uint64_t epoch_seed) {
    VariateSource s;
    s.z1 = s.z2 = epoch_seed;
    return s;
  }

  static VariateSource from_schedule(const SeedSchedule& sched) {
    VariateSource s;
    s.z1 = sched.z1;
    s.z2 = sched.z2;
    s.c = sched.contribution();
    s.smoothed = sched.smoothing_active();
    if (s.c == 0.0) {
      s.cos_c = 1.0;
      s.sin_c = 0.0;
    } else if (s.c == 1.0) {
      s.cos_c = 0.0;
      s.sin_c = 1.0;
    } else {
      const double angle = s.c * 1.5707963267948966192;
      s.cos_c = std::cos(angle);
      s.sin_c = std::sin(angle);
    }
    return s;
  }

  VariatePrefix prefix(std::initializer_list<std::uint64_t> ids) const {
    VariatePrefix p;
    p.h1 = hash_init(z1);
    for (const std::uint64_t id : ids) p.h1 = hash_step(p.h1, id);
    if (smoothed) {
      p.h2 = hash_init(z2);
      for (const std::uint64_t id : ids) p.h2 = hash_step(p.h2, id);
    }
    return p;
  }

  double finish(std::uint64_t b1, std::uint64_t b2) const {
    if (!smoothed) return uniform_from_bits(b1);
    const double n = cos_c * normal_from_bits(b1) + sin_c * normal_from_bits(b2);
    return phi(n);
  }

  double uniform_tail1(const VariatePrefix& p, std::uint64_t a) const {
    return finish(hash_step(p.h1, a), smoothed ? hash_step(p.h2, a) : 0);
  }

  double uniform_tail2(const VariatePrefix& p, std::uint64_t a,
                       std::uint64_t b) const {
    const std::uint64_t b1 = hash_step(hash_step(p.h1, a), b);
    return finish(b1, smoothed ? hash_step(hash_step(p.h2, a), b) : 0);
  }

  double uniform(std::initializer_list<std::uint64_t> ids) const {
    if (!smoothed) return hash_uniform(z1, ids);
    return finish(hash_bits(z1, ids), hash_bits(z2, ids));
  }
};

/// Full 1-hop neighborhoods, no randomness.
BipartiteBlock sample_full(const Graph& g, std::span<const VertexId> seeds,
                           int layer = 0);

/// Neighbor Sampling: seeds with degree <= k keep their whole neighborhood;
/// larger ones get exactly k distinct edge positions chosen by a reservoir
/// whose rolls depend only on (epoch_seed, layer, s, position) — a seed's
/// sample never depends on the rest of the batch.
BipartiteBlock sample_ns(const Graph& g, std::span<const VertexId> seeds,
                         std::uint32_t k, std::uint64_t epoch_seed,
                         int layer = 0);

/// LABOR-0: edge (t->s) is kept iff variate(t) <= k / d_s. All seeds in the
/// batch see the same variate for a shared t.
BipartiteBlock sample_labor0(const Graph& g, std::span<const VertexId> seeds,
                             std::uint32_t k,
                             const std::function<double(VertexId)>& variate,
                             int layer = 0);

/// Random walks with restart: per seed, rw_walks walks of rw_length steps;
/// after the first step the walk continues from the current vertex with
/// probability 1-p and from the seed's neighborhood otherwise. The top-k most
/// visited non-seed vertices (ties to the smaller id) become the sampled
/// in-neighbors. Weighted graphs pick neighbors proportional to edge weight.
BipartiteBlock sample_rw(const Graph& g, std::span<const VertexId> seeds,
                         const SamplerConfig& cfg, std::uint64_t epoch_seed,
                         int layer = 0);

/// Dispatch on cfg.kind with variates drawn from `source`, namespaced by
/// `layer`. sample_ns/sample_labor0/sample_rw are thin wrappers over this.
BipartiteBlock sample_block(const Graph& g, std::span<const VertexId> seeds,
                            const SamplerConfig& cfg,
                            const VariateSource& source, int layer);

/// Multi-layer expansion: block l's destinations are block l-1's sources.
/// Layers draw from independent streams. Schedules with kappa in {1, inf}
/// use the plain hash stream under z1 (so an L=1 NS expansion equals
/// sample_ns with epoch_seed = z1 exactly); finite kappa >= 2 smooths all
/// variates via interpolation.
LayerStack expand(const Graph& g, std::span<const VertexId> seeds,
                  int num_layers, const SamplerConfig& cfg,
                  const SeedSchedule& schedule);

/// Edge-prediction seeds: for every positive edge, sample one negative edge
/// sharing a uniformly chosen endpoint, the other endpoint uniform over
/// non-neighbors; returns the dedup union of all endpoints in first-seen
/// order. Requires an undirected graph. Throws after 100 rejected negative
/// candidates for a vertex adjacent to everything.
std::vector<VertexId> edge_pred_seeds(
    const Graph& g, std::span<const std::pair<VertexId, VertexId>> edge_batch,
    std::uint64_t epoch_seed);

}  // namespace coopbatch
