#include "coopbatch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "coopbatch/rng.hpp"

namespace coopbatch {

namespace {

Graph build_csr_impl(const std::vector<Edge>& edges, const std::vector<float>* wts,
                     std::uint64_t num_vertices) {
  if (wts && wts->size() != edges.size())
    throw InputError("build_csr: weight count does not match edge count");

  Graph g;
  g.num_vertices = num_vertices;
  g.indptr.assign(num_vertices + 1, 0);

  for (const Edge& e : edges) {
    if (e.src >= num_vertices || e.dst >= num_vertices)
      throw InputError("build_csr: edge (" + std::to_string(e.src) + " -> " +
                       std::to_string(e.dst) + ") has id >= " +
                       std::to_string(num_vertices));
    g.indptr[e.dst + 1] += 1;
  }
  for (std::uint64_t v = 0; v < num_vertices; ++v) g.indptr[v + 1] += g.indptr[v];

  g.indices.resize(edges.size());
  if (wts) g.weights.resize(edges.size());
  std::vector<std::uint64_t> cursor(g.indptr.begin(), g.indptr.end() - 1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::uint64_t slot = cursor[edges[i].dst]++;
    g.indices[slot] = edges[i].src;
    if (wts) {
      if ((*wts)[i] <= 0.0f)
        throw InputError("build_csr: edge weights must be > 0");
      g.weights[slot] = (*wts)[i];
    }
  }
  return g;
}

}  // namespace

Graph build_csr(const std::vector<Edge>& edges, std::uint64_t num_vertices) {
  return build_csr_impl(edges, nullptr, num_vertices);
}

Graph build_csr(const std::vector<Edge>& edges, const std::vector<float>& edge_weights,
                std::uint64_t num_vertices) {
  return build_csr_impl(edges, &edge_weights, num_vertices);
}

std::span<const VertexId> neighbors(const Graph& g, VertexId v) {
  return g.neighbors(v);
}

Graph make_undirected(const Graph& g) {
  // Unordered-pair dedup; weighted graphs keep the max weight seen across the
  // parallel/reverse copies of a pair.
  struct PairHash {
    std::size_t operator()(std::uint64_t k) const { return mix64(k); }
  };
  std::unordered_map<std::uint64_t, float, PairHash> pair_weight;
  pair_weight.reserve(g.num_edges() * 2);

  const bool weighted = g.has_weights();
  for (VertexId s = 0; s < g.num_vertices; ++s) {
    const auto ns = g.neighbors(s);
    const auto ws = g.neighbor_weights(s);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const VertexId t = ns[i];
      const VertexId lo = std::min(t, s), hi = std::max(t, s);
      const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | hi;
      const float w = weighted ? ws[i] : 1.0f;
      auto [it, inserted] = pair_weight.emplace(key, w);
      if (!inserted && w > it->second) it->second = w;
    }
  }

  std::vector<std::uint64_t> keys;
  keys.reserve(pair_weight.size());
  for (const auto& kv : pair_weight) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());

  std::vector<Edge> edges;
  std::vector<float> weights;
  edges.reserve(keys.size() * 2);
  for (const std::uint64_t key : keys) {
    const auto lo = static_cast<VertexId>(key >> 32);
    const auto hi = static_cast<VertexId>(key & 0xffffffffu);
    const float w = pair_weight[key];
    edges.push_back({lo, hi});
    if (lo != hi) edges.push_back({hi, lo});
    if (weighted) {
      weights.push_back(w);
      if (lo != hi) weights.push_back(w);
    }
  }
  return weighted ? build_csr(edges, weights, g.num_vertices)
                  : build_csr(edges, g.num_vertices);
}

Graph generate_powerlaw(std::uint64_t num_vertices, double avg_degree,
                        double skew, std::uint64_t seed) {
  if (num_vertices < 1) throw InputError("generate_powerlaw: num_vertices >= 1");
  if (!(avg_degree > 0.0)) throw InputError("generate_powerlaw: avg_degree > 0");

  // Endpoint CDF over w_v = (v+1)^-skew.
  std::vector<double> cdf(num_vertices);
  double acc = 0.0;
  for (std::uint64_t v = 0; v < num_vertices; ++v) {
    acc += std::pow(static_cast<double>(v + 1), -skew);
    cdf[v] = acc;
  }
  const double total = acc;
  auto draw = [&](std::uint64_t attempt, std::uint64_t side) -> VertexId {
    const double u = hash_uniform(seed, {kStreamGenerate, attempt, side}) * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::uint64_t v = static_cast<std::uint64_t>(it - cdf.begin());
    return static_cast<VertexId>(std::min(v, num_vertices - 1));
  };

  const std::uint64_t target = static_cast<std::uint64_t>(
      std::llround(avg_degree * static_cast<double>(num_vertices)));
  struct KeyHash {
    std::size_t operator()(std::uint64_t k) const { return mix64(k); }
  };
  std::unordered_set<std::uint64_t, KeyHash> seen;
  seen.reserve(target * 2);
  std::vector<Edge> edges;
  edges.reserve(target);

  const std::uint64_t max_attempts = target * 20 + 100;
  for (std::uint64_t a = 0; a < max_attempts && edges.size() < target; ++a) {
    const VertexId src = draw(a, 0);
    const VertexId dst = draw(a, 1);
    if (src == dst) continue;
    const std::uint64_t key = (static_cast<std::uint64_t>(src) << 32) | dst;
    if (!seen.insert(key).second) continue;
    edges.push_back({src, dst});
  }
  return build_csr(edges, num_vertices);
}

Graph load_edge_list(const std::string& path, std::optional<std::uint64_t> num_vertices) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list: " + path);

  std::vector<Edge> edges;
  std::vector<float> weights;
  bool any_weight = false;
  std::uint64_t max_id = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::uint64_t src, dst;
    if (!(ss >> src >> dst))
      throw ParseError("edge list: expected 'src dst [weight]'", line_no);
    double w;
    if (ss >> w) {
      if (!(w > 0.0)) throw ParseError("edge list: weight must be > 0", line_no);
      any_weight = true;
      weights.resize(edges.size(), 1.0f);
      weights.push_back(static_cast<float>(w));
    } else if (any_weight) {
      weights.push_back(1.0f);
    }
    std::string trailing;
    if (ss.clear(), ss >> trailing)
      throw ParseError("edge list: trailing tokens", line_no);
    if (src > 0xffffffffull || dst > 0xffffffffull)
      throw ParseError("edge list: vertex id exceeds 32 bits", line_no);
    edges.push_back({static_cast<VertexId>(src), static_cast<VertexId>(dst)});
    max_id = std::max({max_id, src, dst});
  }

  const std::uint64_t n =
      num_vertices.value_or(edges.empty() ? 0 : max_id + 1);
  return any_weight ? build_csr(edges, weights, n) : build_csr(edges, n);
}

namespace {

constexpr char kMagic[4] = {'C', 'B', 'C', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void write_vec(std::ofstream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("csr file truncated reading " + what);
  return v;
}

template <typename T>
std::vector<T> read_vec(std::ifstream& in, std::uint64_t count, const std::string& what) {
  std::vector<T> v(count);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) throw FormatError("csr file truncated reading " + what);
  return v;
}

}  // namespace

void save_csr(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + path);
  out.write(kMagic, 4);
  write_raw(out, kVersion);
  write_raw(out, g.num_vertices);
  const std::uint64_t m = g.num_edges();
  write_raw(out, m);
  write_vec(out, g.indptr);
  write_vec(out, g.indices);
  const std::uint8_t flags = g.has_weights() ? 1 : 0;
  write_raw(out, flags);
  if (g.has_weights()) write_vec(out, g.weights);
  if (!out) throw IoError("write failed: " + path);
}

Graph load_csr(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("not a CBCS file: " + path);
  const auto version = read_raw<std::uint32_t>(in, "version");
  if (version != kVersion)
    throw FormatError("unsupported CBCS version " + std::to_string(version));

  Graph g;
  g.num_vertices = read_raw<std::uint64_t>(in, "num_vertices");
  const auto m = read_raw<std::uint64_t>(in, "num_edges");
  g.indptr = read_vec<std::uint64_t>(in, g.num_vertices + 1, "indptr");
  g.indices = read_vec<VertexId>(in, m, "indices");
  const auto flags = read_raw<std::uint8_t>(in, "flags");
  if (flags & 1) g.weights = read_vec<float>(in, m, "weights");
  validate_csr(g);
  return g;
}

void validate_csr(const Graph& g) {
  if (g.indptr.size() != g.num_vertices + 1)
    throw InputError("csr: indptr size mismatch");
  if (g.indptr.front() != 0) throw InputError("csr: indptr[0] != 0");
  if (g.indptr.back() != g.indices.size())
    throw InputError("csr: indptr[n] != num edges");
  for (std::uint64_t v = 0; v < g.num_vertices; ++v)
    if (g.indptr[v] > g.indptr[v + 1])
      throw InputError("csr: indptr not nondecreasing at " + std::to_string(v));
  for (const VertexId t : g.indices)
    if (t >= g.num_vertices) throw InputError("csr: index out of range");
  if (!g.weights.empty()) {
    if (g.weights.size() != g.indices.size())
      throw InputError("csr: weights size mismatch");
    for (const float w : g.weights)
      if (!(w > 0.0f)) throw InputError("csr: weights must be > 0");
  }
}

}  // namespace coopbatch
