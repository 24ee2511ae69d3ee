#pragma once

#include <cstdint>
#include <vector>

#include "coopbatch/graph.hpp"

namespace coopbatch {

/// 1D vertex ownership: vertex v and all of its incoming edges live on part
/// owner[v].
struct PartitionMap {
  std::uint32_t num_parts = 1;
  std::vector<std::uint32_t> owner;  // one entry per vertex

  std::uint32_t part_of(VertexId v) const { return owner[v]; }
};

/// owner(v) = hash(seed, v) mod parts.
PartitionMap partition_random(std::uint64_t num_vertices, std::uint32_t parts,
                              std::uint64_t seed);

/// Greedy BFS region growing over the symmetrized adjacency with per-part
/// size cap ceil(n/parts). A cheap stand-in for a real partitioner: on
/// connected graphs it cuts fewer edges than random ownership.
PartitionMap partition_locality(const Graph& g, std::uint32_t parts);

/// Fraction of edges whose endpoints have different owners. 0 when the graph
/// has no edges.
double cross_edge_ratio(const Graph& g, const PartitionMap& pm);

/// Throws InputError unless pm covers [0, num_vertices) with owners < parts.
void validate_partition(const PartitionMap& pm, std::uint64_t num_vertices);

/// Vertices of each part, ascending ids.
std::vector<std::vector<VertexId>> part_members(const PartitionMap& pm);

}  // namespace coopbatch
