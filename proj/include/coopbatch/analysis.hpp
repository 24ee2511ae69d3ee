#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coopbatch/samplers.hpp"

namespace coopbatch {

struct WorkCurvePoint {
  std::uint64_t batch_size = 0;
  double mean_sl = 0.0;       // mean |S^L| over trials
  double se_sl = 0.0;         // standard error of the mean
  double work_per_seed = 0.0; // mean_sl / batch_size
  double se_work = 0.0;
};

struct WorkCurve {
  int layer = 0;
  std::vector<WorkCurvePoint> points;  // batch sizes strictly increasing
};

enum class SeedMode { kNode, kEdge };

/// Sample `trials` batches per batch size (seeds uniform without replacement;
/// edge mode draws positive edges and derives seeds from them), expand L
/// layers, and record the mean and standard error of |S^L|.
WorkCurve work_curve(const Graph& g, const SamplerConfig& cfg,
                     std::span<const std::uint64_t> batch_sizes,
                     std::uint32_t trials, int num_layers, std::uint64_t seed,
                     SeedMode mode = SeedMode::kNode);

struct ConcavityEntry {
  std::size_t index = 0;     // interior point the second difference is at
  double second_diff = 0.0;  // slope(i..i+1) - slope(i-1..i)
  double threshold = 0.0;    // +2 pooled standard errors
  bool violation = false;
};

struct ConcavityReport {
  std::vector<ConcavityEntry> entries;
  bool pass = true;
};

/// Discrete concavity of mean |S^L| against batch size: every divided second
/// difference must stay below +2 pooled standard errors.
ConcavityReport concavity_check(const WorkCurve& curve);

/// |T_l| and |T2_l|: vertices of the full l-hop expansion of s0 reachable
/// from exactly one seed, and from exactly one unordered pair of seeds.
std::pair<std::uint64_t, std::uint64_t> unique_attribution(
    const Graph& g, std::span<const VertexId> s0, int l);

struct IdentityReport {
  std::uint64_t trials = 0;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  std::vector<std::string> failures;
  bool pass() const { return violations == 0; }
};

/// Exact verification of the leave-one-out identities behind the work
/// theorems, under full (deterministic) expansion:
///   (i)  sum_s (|S^l| - |S'^l|) == |T_l(S^0)|
///   (ii) |S^l| (n-1) <= sum_s |S'^l|
///   (iii) |T_l| - 2|T2_l| == sum_s (|T_l(S^0)| - |T_l(S'^0)|)
/// with S'^0 = S^0 minus one seed. trials = 0 enumerates every n-subset
/// instead of sampling. Capped at |V| <= 64 and n <= 6.
IdentityReport verify_identities(const Graph& g, std::uint32_t n, int l,
                                 std::uint32_t trials, std::uint64_t seed);

/// Bandwidth/medium parameters of the proportional cost model.
struct CostParams {
  double alpha = 600e9;   // cross-PE (all-to-all) bandwidth
  double beta = 64e9;     // storage-to-PE bandwidth
  double gamma = 2e12;    // PE memory bandwidth
  double cross_edge_ratio = 0.75;  // c
  double feature_dim = 256;        // d
  double cache_miss_rate = 1.0;    // rho
  double model_cost = 1.0;         // M, relative forward/backward work
  std::uint32_t parts = 1;
};

/// Measured per-part sizes of one pipeline, innermost layer first.
struct SizeProfile {
  struct Layer {
    std::uint64_t s_l = 0;          // |S^l_p|
    std::uint64_t s_tilde_next = 0; // |S~^{l+1}_p|
    std::uint64_t e_l = 0;          // |E^l_p|
  };
  std::vector<Layer> layers;
  std::uint64_t s_final = 0;  // input rows loaded from storage per part
};

struct StageCost {
  double sampling = 0.0;
  double feature_loading = 0.0;
  double forward_backward = 0.0;
  double total() const { return sampling + feature_loading + forward_backward; }
};

struct CostEstimate {
  StageCost independent;
  StageCost cooperative;
};

/// Evaluate the per-stage cost expressions (unit constants) for measured
/// independent and cooperative size profiles. Independent pays no cross-PE
/// term; cooperative adds c/alpha traffic for every redistributed row.
CostEstimate cost_estimate(const CostParams& p, const SizeProfile& indep,
                           const SizeProfile& coop);

}  // namespace coopbatch
