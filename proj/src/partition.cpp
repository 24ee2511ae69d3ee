#include "coopbatch/partition.hpp"

#include <algorithm>
#include <queue>

#include "coopbatch/rng.hpp"

namespace coopbatch {

PartitionMap partition_random(std::uint64_t num_vertices, std::uint32_t parts,
                              std::uint64_t seed) {
  if (parts == 0) throw InputError("partition_random: parts must be >= 1");
  PartitionMap pm;
  pm.num_parts = parts;
  pm.owner.resize(num_vertices);
  for (std::uint64_t v = 0; v < num_vertices; ++v)
    pm.owner[v] = static_cast<std::uint32_t>(
        hash_bits(seed, {kStreamPartition, v}) % parts);
  return pm;
}

PartitionMap partition_locality(const Graph& g, std::uint32_t parts) {
  if (parts == 0) throw InputError("partition_locality: parts must be >= 1");
  const std::uint64_t n = g.num_vertices;
  PartitionMap pm;
  pm.num_parts = parts;
  pm.owner.assign(n, parts == 1 ? 0 : static_cast<std::uint32_t>(parts - 1));
  if (parts == 1 || n == 0) return pm;

  // Symmetrized adjacency for region growing.
  std::vector<std::uint64_t> deg(n + 1, 0);
  for (VertexId s = 0; s < n; ++s)
    for (const VertexId t : g.neighbors(s)) {
      deg[t + 1] += 1;
      deg[s + 1] += 1;
    }
  for (std::uint64_t v = 0; v < n; ++v) deg[v + 1] += deg[v];
  std::vector<VertexId> adj(deg[n]);
  std::vector<std::uint64_t> cursor(deg.begin(), deg.end() - 1);
  for (VertexId s = 0; s < n; ++s)
    for (const VertexId t : g.neighbors(s)) {
      adj[cursor[t]++] = s;
      adj[cursor[s]++] = t;
    }

  const std::uint64_t cap = (n + parts - 1) / parts;
  std::vector<bool> assigned(n, false);
  std::uint64_t next_start = 0;

  for (std::uint32_t p = 0; p + 1 < parts; ++p) {
    std::uint64_t grown = 0;
    std::queue<VertexId> frontier;
    while (grown < cap) {
      if (frontier.empty()) {
        while (next_start < n && assigned[next_start]) ++next_start;
        if (next_start >= n) break;
        assigned[next_start] = true;
        pm.owner[next_start] = p;
        ++grown;
        frontier.push(static_cast<VertexId>(next_start));
        continue;
      }
      const VertexId v = frontier.front();
      frontier.pop();
      for (std::uint64_t i = deg[v]; i < deg[v + 1] && grown < cap; ++i) {
        const VertexId u = adj[i];
        if (assigned[u]) continue;
        assigned[u] = true;
        pm.owner[u] = p;
        ++grown;
        frontier.push(u);
      }
    }
  }
  // Whatever is left belongs to the last part (preset above).
  return pm;
}

double cross_edge_ratio(const Graph& g, const PartitionMap& pm) {
  validate_partition(pm, g.num_vertices);
  if (g.num_edges() == 0) return 0.0;
  std::uint64_t cross = 0;
  for (VertexId s = 0; s < g.num_vertices; ++s) {
    const std::uint32_t os = pm.owner[s];
    for (const VertexId t : g.neighbors(s))
      if (pm.owner[t] != os) ++cross;
  }
  return static_cast<double>(cross) / static_cast<double>(g.num_edges());
}

void validate_partition(const PartitionMap& pm, std::uint64_t num_vertices) {
  if (pm.num_parts == 0) throw InputError("partition: zero parts");
  if (pm.owner.size() != num_vertices)
    throw InputError("partition: owner array does not cover all vertices");
  for (const std::uint32_t o : pm.owner)
    if (o >= pm.num_parts) throw InputError("partition: owner id out of range");
}

std::vector<std::vector<VertexId>> part_members(const PartitionMap& pm) {
  std::vector<std::vector<VertexId>> members(pm.num_parts);
  for (std::uint64_t v = 0; v < pm.owner.size(); ++v)
    members[pm.owner[v]].push_back(static_cast<VertexId>(v));
  return members;
}

}  // namespace coopbatch
