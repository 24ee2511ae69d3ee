#include "coopbatch/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

#include "coopbatch/parallel.hpp"

namespace coopbatch {

namespace {

/// batch_size distinct vertices, deterministic in (seed, tag).
std::vector<VertexId> draw_seeds(const Graph& g, std::uint64_t batch_size,
                                 std::uint64_t seed, std::uint64_t tag) {
  if (batch_size > g.num_vertices)
    throw InputError("seed draw: batch size exceeds vertex count");
  std::vector<VertexId> out;
  out.reserve(batch_size);
  std::unordered_set<VertexId> seen;
  seen.reserve(batch_size * 2);
  std::uint64_t attempt = 0;
  while (out.size() < batch_size) {
    const double u = hash_uniform(seed, {kStreamSeedDraw, tag, attempt++});
    auto v = static_cast<VertexId>(u * static_cast<double>(g.num_vertices));
    if (v >= g.num_vertices) v = static_cast<VertexId>(g.num_vertices - 1);
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

/// batch_size distinct edges as (src, dst) pairs.
std::vector<std::pair<VertexId, VertexId>> draw_edges(const Graph& g,
                                                      std::uint64_t batch_size,
                                                      std::uint64_t seed,
                                                      std::uint64_t tag) {
  if (batch_size > g.num_edges())
    throw InputError("seed draw: batch size exceeds edge count");
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(batch_size);
  std::unordered_set<std::uint64_t> seen;
  std::uint64_t attempt = 0;
  while (out.size() < batch_size) {
    const double u = hash_uniform(seed, {kStreamSeedDraw, tag, 1, attempt++});
    auto e = static_cast<std::uint64_t>(u * static_cast<double>(g.num_edges()));
    if (e >= g.num_edges()) e = g.num_edges() - 1;
    if (!seen.insert(e).second) continue;
    // destination owning edge slot e
    const auto it = std::upper_bound(g.indptr.begin(), g.indptr.end(), e);
    const auto dst = static_cast<VertexId>(it - g.indptr.begin() - 1);
    out.push_back({g.indices[e], dst});
  }
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  if (xs.empty()) return r;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double ss = 0.0;
  for (const double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                   static_cast<double>(xs.size()));
  return r;
}

}  // namespace

WorkCurve work_curve(const Graph& g, const SamplerConfig& cfg,
                     std::span<const std::uint64_t> batch_sizes,
                     std::uint32_t trials, int num_layers, std::uint64_t seed,
                     SeedMode mode) {
  if (trials == 0) throw InputError("work_curve: trials must be >= 1");
  WorkCurve curve;
  curve.layer = num_layers;
  curve.points.resize(batch_sizes.size());

  for (std::size_t bi = 0; bi < batch_sizes.size(); ++bi) {
    const std::uint64_t b = batch_sizes[bi];
    if (bi > 0 && b <= batch_sizes[bi - 1])
      throw InputError("work_curve: batch sizes must be strictly increasing");

    std::vector<double> sl(trials, 0.0);
    parallel_for(trials, [&](std::size_t t) {
      const std::uint64_t tag = hash_bits(seed, {b, t});
      std::vector<VertexId> seeds;
      if (mode == SeedMode::kNode) {
        seeds = draw_seeds(g, b, seed, tag);
      } else {
        const auto edges = draw_edges(g, b, seed, tag);
        seeds = edge_pred_seeds(g, edges, hash_bits(seed, {tag, 7}));
      }
      SeedSchedule sched;  // plain stream, fresh per trial
      sched.z1 = sched.z2 = hash_bits(seed, {tag, 9});
      const LayerStack stack = expand(g, seeds, num_layers, cfg, sched);
      sl[t] = static_cast<double>(stack.input_vertices().size());
    });

    const MeanSe ms = mean_se(sl);
    auto& pt = curve.points[bi];
    pt.batch_size = b;
    pt.mean_sl = ms.mean;
    pt.se_sl = ms.se;
    pt.work_per_seed = ms.mean / static_cast<double>(b);
    pt.se_work = ms.se / static_cast<double>(b);
  }
  return curve;
}

ConcavityReport concavity_check(const WorkCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 3)
    throw InputError("concavity_check: need at least 3 batch sizes");

  ConcavityReport report;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double h0 = static_cast<double>(pts[i].batch_size - pts[i - 1].batch_size);
    const double h1 = static_cast<double>(pts[i + 1].batch_size - pts[i].batch_size);
    const double slope0 = (pts[i].mean_sl - pts[i - 1].mean_sl) / h0;
    const double slope1 = (pts[i + 1].mean_sl - pts[i].mean_sl) / h1;
    // Var of the slope difference; the shared middle point appears in both.
    const double var = pts[i - 1].se_sl * pts[i - 1].se_sl / (h0 * h0) +
                       pts[i + 1].se_sl * pts[i + 1].se_sl / (h1 * h1) +
                       pts[i].se_sl * pts[i].se_sl * (1.0 / h0 + 1.0 / h1) *
                           (1.0 / h0 + 1.0 / h1);
    ConcavityEntry e;
    e.index = i;
    e.second_diff = slope1 - slope0;
    e.threshold = 2.0 * std::sqrt(var);
    e.violation = e.second_diff > e.threshold;
    if (e.violation) report.pass = false;
    report.entries.push_back(e);
  }
  return report;
}

namespace {

constexpr std::uint64_t kMaxEnumVertices = 64;
constexpr std::uint32_t kMaxEnumBatch = 6;

/// Full l-hop expansion of each seed as a bitmask over <=64 vertices.
std::uint64_t closure_mask(const Graph& g, VertexId s, int l) {
  std::uint64_t mask = 1ULL << s;
  for (int i = 0; i < l; ++i) {
    std::uint64_t next = mask;
    for (VertexId v = 0; v < g.num_vertices; ++v)
      if (mask & (1ULL << v))
        for (const VertexId t : g.neighbors(v)) next |= 1ULL << t;
    if (next == mask) break;
    mask = next;
  }
  return mask;
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> unique_attribution(
    const Graph& g, std::span<const VertexId> s0, int l) {
  if (s0.empty()) throw InputError("unique_attribution: need at least one seed");
  std::vector<std::uint32_t> owners;  // per vertex: how many seed closures hold it
  owners.assign(g.num_vertices, 0);
  for (const VertexId s : s0) {
    g.check_vertex(s);
    // general-size closure via BFS sets
    std::vector<bool> in(g.num_vertices, false);
    std::vector<VertexId> frontier{s};
    in[s] = true;
    for (int i = 0; i < l; ++i) {
      std::vector<VertexId> next;
      for (const VertexId v : frontier)
        for (const VertexId t : g.neighbors(v))
          if (!in[t]) {
            in[t] = true;
            next.push_back(t);
          }
      frontier = std::move(next);
      if (frontier.empty()) break;
    }
    for (std::uint64_t v = 0; v < g.num_vertices; ++v)
      if (in[v]) owners[v] += 1;
  }
  std::uint64_t t1 = 0, t2 = 0;
  for (const std::uint32_t c : owners) {
    if (c == 1) ++t1;
    if (c == 2) ++t2;  // exactly one unordered seed pair shares it
  }
  return {t1, t2};
}

IdentityReport verify_identities(const Graph& g, std::uint32_t n, int l,
                                 std::uint32_t trials, std::uint64_t seed) {
  if (g.num_vertices > kMaxEnumVertices)
    throw InputError("verify_identities: graph too large to enumerate (max 64)");
  if (n > kMaxEnumBatch)
    throw InputError("verify_identities: batch size capped at 6");
  if (n < 1 || n > g.num_vertices)
    throw InputError("verify_identities: need 1 <= n <= |V|");

  std::vector<std::uint64_t> closures(g.num_vertices);
  for (VertexId v = 0; v < g.num_vertices; ++v) closures[v] = closure_mask(g, v, l);

  IdentityReport report;
  auto check_batch = [&](const std::vector<VertexId>& batch) {
    report.trials += 1;
    std::uint64_t full = 0;
    for (const VertexId s : batch) full |= closures[s];
    const auto size_full = static_cast<std::int64_t>(std::popcount(full));

    // T_l / T2_l via per-vertex seed multiplicity.
    std::int64_t t1 = 0, t2 = 0;
    for (std::uint64_t v = 0; v < g.num_vertices; ++v) {
      if (!(full & (1ULL << v))) continue;
      int owners = 0;
      for (const VertexId s : batch)
        if (closures[s] & (1ULL << v)) ++owners;
      if (owners == 1) ++t1;
      if (owners == 2) ++t2;
    }

    std::int64_t sum_drop = 0;       // sum over leave-one-out of |S^l| - |S'^l|
    std::int64_t sum_sub_sizes = 0;  // sum of |S'^l|
    std::int64_t sum_t_drop = 0;     // sum of |T_l(S^0)| - |T_l(S'^0)|
    for (std::size_t skip = 0; skip < batch.size(); ++skip) {
      std::uint64_t sub = 0;
      std::vector<VertexId> sub_batch;
      for (std::size_t i = 0; i < batch.size(); ++i)
        if (i != skip) {
          sub |= closures[batch[i]];
          sub_batch.push_back(batch[i]);
        }
      const auto size_sub = static_cast<std::int64_t>(std::popcount(sub));
      sum_drop += size_full - size_sub;
      sum_sub_sizes += size_sub;

      std::int64_t sub_t1 = 0;
      if (!sub_batch.empty()) {
        for (std::uint64_t v = 0; v < g.num_vertices; ++v) {
          if (!(sub & (1ULL << v))) continue;
          int owners = 0;
          for (const VertexId s : sub_batch)
            if (closures[s] & (1ULL << v)) ++owners;
          if (owners == 1) ++sub_t1;
        }
      }
      sum_t_drop += t1 - sub_t1;
    }

    report.checks += 3;
    if (sum_drop != t1) {
      report.violations += 1;
      report.failures.push_back("identity (i) failed: sum(|S^l|-|S'^l|)=" +
                                std::to_string(sum_drop) + " vs |T_l|=" +
                                std::to_string(t1));
    }
    if (size_full * static_cast<std::int64_t>(batch.size() - 1) > sum_sub_sizes) {
      report.violations += 1;
      report.failures.push_back("inequality (ii) failed");
    }
    if (t1 - 2 * t2 != sum_t_drop) {
      report.violations += 1;
      report.failures.push_back("identity (iii) failed: |T_l|-2|T2_l|=" +
                                std::to_string(t1 - 2 * t2) + " vs sum=" +
                                std::to_string(sum_t_drop));
    }
  };

  if (trials == 0) {
    // Exhaustive over all n-subsets.
    std::vector<VertexId> batch(n);
    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    while (true) {
      for (std::uint32_t i = 0; i < n; ++i) batch[i] = static_cast<VertexId>(idx[i]);
      check_batch(batch);
      std::int32_t i = static_cast<std::int32_t>(n) - 1;
      while (i >= 0 && idx[i] == g.num_vertices - n + i) --i;
      if (i < 0) break;
      idx[i] += 1;
      for (std::uint32_t j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
  } else {
    for (std::uint32_t t = 0; t < trials; ++t)
      check_batch(draw_seeds(g, n, seed, t));
  }
  return report;
}

CostEstimate cost_estimate(const CostParams& p, const SizeProfile& indep,
                           const SizeProfile& coop) {
  if (!(p.alpha > 0.0 && p.beta > 0.0 && p.gamma > 0.0))
    throw InputError("cost_estimate: bandwidths must be positive");
  if (!(p.cross_edge_ratio >= 0.0 && p.cross_edge_ratio <= 1.0))
    throw InputError("cost_estimate: c must be in [0,1]");
  if (!(p.cache_miss_rate >= 0.0 && p.cache_miss_rate <= 1.0))
    throw InputError("cost_estimate: rho must be in [0,1]");
  if (indep.layers.size() != coop.layers.size())
    throw InputError("cost_estimate: profiles must have equal depth");

  const double c = p.cross_edge_ratio;
  CostEstimate est;
  for (std::size_t l = 0; l < indep.layers.size(); ++l) {
    const auto& il = indep.layers[l];
    const auto& cl = coop.layers[l];
    est.independent.sampling += static_cast<double>(il.s_l) / p.beta;
    est.cooperative.sampling += static_cast<double>(cl.s_l) / p.beta +
                                static_cast<double>(cl.s_tilde_next) * c / p.alpha;
    const double m_indep =
        static_cast<double>(il.s_l + il.e_l + il.s_tilde_next);
    const double m_coop = static_cast<double>(cl.s_l + cl.e_l + cl.s_tilde_next);
    est.independent.forward_backward +=
        p.model_cost * m_indep * p.feature_dim / p.gamma;
    est.cooperative.forward_backward +=
        p.model_cost * m_coop * p.feature_dim / p.gamma +
        static_cast<double>(cl.s_tilde_next) * p.feature_dim * c / p.alpha;
  }
  est.independent.feature_loading = static_cast<double>(indep.s_final) *
                                    p.feature_dim * p.cache_miss_rate / p.beta;
  est.cooperative.feature_loading =
      static_cast<double>(coop.s_final) * p.feature_dim * p.cache_miss_rate /
          p.beta +
      static_cast<double>(coop.layers.back().s_tilde_next) * p.feature_dim * c /
          p.alpha;
  return est;
}

}  // namespace coopbatch
