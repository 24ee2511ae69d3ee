#pragma once

#include <vector>

#include "coopbatch/graph.hpp"

namespace fixtures {

using coopbatch::Edge;
using coopbatch::Graph;
using coopbatch::VertexId;

/// Circulant 6-vertex fixture with N(s) = {s+1, s+2 mod 6}; every in-degree 2.
inline Graph toy6() {
  std::vector<Edge> edges;
  for (VertexId s = 0; s < 6; ++s) {
    edges.push_back({static_cast<VertexId>((s + 1) % 6), s});
    edges.push_back({static_cast<VertexId>((s + 2) % 6), s});
  }
  return coopbatch::build_csr(edges, 6);
}

/// Star: `leaves` in-neighbors 1..leaves pointing at center 0.
inline Graph star(VertexId leaves) {
  std::vector<Edge> edges;
  for (VertexId i = 1; i <= leaves; ++i) edges.push_back({i, 0});
  return coopbatch::build_csr(edges, leaves + 1);
}

/// Undirected path 0-1-...-(n-1).
inline Graph path(VertexId n) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i + 1 < n; ++i) edges.push_back({i, static_cast<VertexId>(i + 1)});
  return coopbatch::make_undirected(coopbatch::build_csr(edges, n));
}

/// Weighted undirected 4-chain 0-1-2-3 with pair weights 1, 2, 3.
inline Graph weighted_chain4() {
  const std::vector<Edge> edges = {{0, 1}, {1, 2}, {2, 3}};
  const std::vector<float> weights = {1.0f, 2.0f, 3.0f};
  return coopbatch::make_undirected(coopbatch::build_csr(edges, weights, 4));
}

}  // namespace fixtures
