#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coopbatch/common.hpp"

namespace coopbatch {

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
};

/// Immutable in-neighbor CSR: the edge t->s is stored under destination s,
/// so neighbors(s) is N(s) = { t | (t->s) in E }. Weights, when present, are
/// positive and aligned with indices.
struct Graph {
  std::uint64_t num_vertices = 0;
  std::vector<std::uint64_t> indptr;  // size num_vertices + 1
  std::vector<VertexId> indices;      // in-neighbors, grouped by destination
  std::vector<float> weights;         // empty, or one per edge

  std::uint64_t num_edges() const { return indices.size(); }
  bool has_weights() const { return !weights.empty(); }

  std::uint64_t degree(VertexId v) const {
    check_vertex(v);
    return indptr[v + 1] - indptr[v];
  }

  std::span<const VertexId> neighbors(VertexId v) const {
    check_vertex(v);
    return {indices.data() + indptr[v],
            static_cast<std::size_t>(indptr[v + 1] - indptr[v])};
  }

  std::span<const float> neighbor_weights(VertexId v) const {
    check_vertex(v);
    if (!has_weights()) return {};
    return {weights.data() + indptr[v],
            static_cast<std::size_t>(indptr[v + 1] - indptr[v])};
  }

  void check_vertex(VertexId v) const {
    if (v >= num_vertices)
      throw InputError("vertex id " + std::to_string(v) + " out of range [0, " +
                       std::to_string(num_vertices) + ")");
  }
};

/// Build CSR from an edge list. Duplicates are kept (multigraph tolerated);
/// within each destination the input order of edges is preserved.
Graph build_csr(const std::vector<Edge>& edges, std::uint64_t num_vertices);
Graph build_csr(const std::vector<Edge>& edges, const std::vector<float>& edge_weights,
                std::uint64_t num_vertices);

std::span<const VertexId> neighbors(const Graph& g, VertexId v);

/// Symmetrize: every edge t->s gains its reverse s->t; parallel duplicates are
/// merged. For weighted graphs the merged edge keeps the max weight seen in
/// either direction. Idempotent.
Graph make_undirected(const Graph& g);

/// Seeded heavy-tailed random graph: endpoints of a fixed number of directed
/// edges (~num_vertices * avg_degree after dedup) are drawn from a Zipf-like
/// weight profile w_v = (v+1)^-skew. skew = 0 degenerates to uniform.
Graph generate_powerlaw(std::uint64_t num_vertices, double avg_degree,
                        double skew, std::uint64_t seed);

/// Text edge list: `src dst [weight]` per line, '#' comments. Vertex count is
/// 1 + max id unless overridden.
Graph load_edge_list(const std::string& path,
                     std::optional<std::uint64_t> num_vertices = std::nullopt);

// Binary CSR container: "CBCS", u32 version=1, u64 n, u64 m, u64 indptr[n+1],
// u32 indices[m], u8 weight flag, f32 weights[m] if flagged. Little-endian.
void save_csr(const Graph& g, const std::string& path);
Graph load_csr(const std::string& path);

/// Throws InputError if the CSR invariants do not hold.
void validate_csr(const Graph& g);

}  // namespace coopbatch
