#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coopbatch/partition.hpp"
#include "coopbatch/samplers.hpp"

namespace coopbatch {

/// Where a requester-side source vertex lives after redistribution: the
/// owning part and the row inside that part's deduplicated next-layer list.
struct RemoteRef {
  std::uint32_t part = 0;
  std::uint64_t row = 0;
};

/// Cached all-to-all bookkeeping for one sampled layer. send_counts[p][q] is
/// the number of vertex ids part p routed to owner q while turning its
/// sampled source list into owned seed lists; the diagonal counts ids that
/// stayed local. src_location[p][j] resolves position j of p's source list to
/// its owner-side row, and is reused verbatim by every later feature/gradient
/// redistribution of the same step.
struct ExchangeRecord {
  int layer = 0;
  std::vector<std::vector<std::uint64_t>> send_counts;
  std::vector<std::vector<RemoteRef>> src_location;
  std::vector<std::uint64_t> owner_row_counts;

  std::uint32_t num_parts() const {
    return static_cast<std::uint32_t>(send_counts.size());
  }
  /// Ids part p sent to other parts (off-diagonal row sum).
  std::uint64_t communicated(std::uint32_t p) const;
  std::uint64_t total_communicated() const;
};

struct CoopSampleResult {
  std::vector<LayerStack> stacks;            // one per part
  std::vector<ExchangeRecord> exchanges;     // one per layer
  std::vector<std::vector<VertexId>> owner_sets;  // S^L_p: input rows per part
};

/// Cooperative sampling across parts: every part samples only for seeds it
/// owns, then sampled ids are routed to their owners and deduplicated (sorted)
/// to become the next layer's seed lists. With one part this reduces exactly
/// to expand(). Seeds not owned by their claimed part are an error.
CoopSampleResult coop_sample(const Graph& g, const PartitionMap& pm,
                             const std::vector<std::vector<VertexId>>& per_pe_seeds,
                             int num_layers, const SamplerConfig& cfg,
                             const SeedSchedule& schedule);

/// Independent baseline: each part expands its own seeds; no exchange.
std::vector<LayerStack> indep_sample(const Graph& g,
                                     const std::vector<std::vector<VertexId>>& per_pe_seeds,
                                     int num_layers, const SamplerConfig& cfg,
                                     const SeedSchedule& schedule);

// Payload redistribution along a cached exchange. Rows are row-major,
// rows[q] holding owner_row_counts[q] (owner-aligned) or src_location[q].size()
// (requester-aligned) rows of `dim` doubles.

/// Owner-aligned rows -> requester-aligned rows (each requester row copies
/// its owner row).
std::vector<std::vector<double>> all_to_all_forward(
    const ExchangeRecord& rec, const std::vector<std::vector<double>>& owner_rows,
    std::uint32_t dim);

/// Inverse reorder of the forward direction; requester rows are written back
/// to their owner rows. Round-trips forward output bit-identically.
std::vector<std::vector<double>> all_to_all_reverse(
    const ExchangeRecord& rec,
    const std::vector<std::vector<double>>& requester_rows, std::uint32_t dim);

/// Reverse with accumulation: owner rows receive the sum over all requesters.
/// This is the gradient path — a vertex requested by several parts gets all
/// of their contributions added.
std::vector<std::vector<double>> all_to_all_reverse_sum(
    const ExchangeRecord& rec,
    const std::vector<std::vector<double>>& requester_rows, std::uint32_t dim);

struct FeatureMatrix {
  std::vector<VertexId> row_ids;
  std::uint32_t dim = 0;
  std::vector<double> values;  // row-major, row_ids.size() x dim

  std::uint64_t rows() const { return row_ids.size(); }
  double* row(std::uint64_t r) { return values.data() + r * dim; }
  const double* row(std::uint64_t r) const { return values.data() + r * dim; }
};

struct DenseMatrix {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> data;  // row-major

  static DenseMatrix zeros(std::uint64_t r, std::uint64_t c) {
    return {r, c, std::vector<double>(r * c, 0.0)};
  }
  double& at(std::uint64_t r, std::uint64_t c) { return data[r * cols + c]; }
  double at(std::uint64_t r, std::uint64_t c) const { return data[r * cols + c]; }
};

enum class Activation { kIdentity, kTanh };

/// One GNN layer: mean-aggregate the sampled in-neighbors of each destination
/// (a destination with no sampled in-edges falls back to its own source row),
/// then apply the linear map W and the activation. H_in rows align with
/// block.src_vertices; the output rows align with block.dst_vertices.
FeatureMatrix gcn_forward(const BipartiteBlock& block, const FeatureMatrix& h_in,
                          const DenseMatrix& w, Activation act);

struct GcnBackwardResult {
  FeatureMatrix grad_h_in;
  DenseMatrix grad_w;
};

/// Gradients of gcn_forward with respect to inputs and weights.
GcnBackwardResult gcn_backward(const BipartiteBlock& block,
                               const FeatureMatrix& h_in, const DenseMatrix& w,
                               const FeatureMatrix& grad_out, Activation act);

/// Toy classifier: L mean-aggregate GCN layers (tanh between layers, linear
/// logits) with softmax cross-entropy on the seeds.
struct GcnModel {
  std::vector<DenseMatrix> weights;  // weights[l] applied at block l
  Activation hidden_activation = Activation::kTanh;

  static GcnModel init(std::uint32_t in_dim, std::uint32_t hidden,
                       std::uint32_t num_classes, int num_layers,
                       std::uint64_t seed);
  std::uint32_t num_classes() const {
    return static_cast<std::uint32_t>(weights.front().cols);
  }
};

/// In-memory stand-in for embedding storage: deterministic synthetic features
/// in [-1,1] and labels. bytes_per_scalar only affects modeled byte counts.
struct FeatureStore {
  std::uint32_t dim = 0;
  std::uint32_t num_classes = 2;
  std::uint32_t bytes_per_scalar = 4;
  std::vector<double> values;       // num_vertices x dim
  std::vector<std::uint32_t> labels;

  static FeatureStore synth(std::uint64_t num_vertices, std::uint32_t dim,
                            std::uint32_t num_classes, std::uint64_t seed,
                            std::uint32_t bytes_per_scalar = 4);

  FeatureMatrix load_rows(std::span<const VertexId> ids) const;
  std::uint64_t bytes_for(std::uint64_t rows) const {
    return rows * dim * bytes_per_scalar;
  }
};

struct LayerMetrics {
  std::uint64_t s_l = 0;        // |S^l_p|   (block destinations)
  std::uint64_t s_tilde_l = 0;  // |S~^{l+1}_p| (block sources)
  std::uint64_t e_l = 0;        // |E^l_p|
  std::uint64_t comm_vertices = 0;  // ids this part sent away at this layer
};

struct PeMetrics {
  std::vector<LayerMetrics> layers;
  std::uint64_t feat_bytes = 0;
  std::uint64_t input_rows = 0;
};

struct StepMetrics {
  std::vector<PeMetrics> per_pe;
  double loss = 0.0;
};

struct TrainStepResult {
  double loss = 0.0;
  std::vector<DenseMatrix> grad_w;  // summed across parts (all-reduce)
  StepMetrics metrics;
};

/// One cooperative training step per Algorithm-1 data flow: cooperative
/// sampling, owner-side feature loading, all-to-all feature/embedding
/// redistribution around each layer, and a backward pass whose reverse
/// exchanges accumulate gradients at the owners. Loss is the mean over all
/// seeds across parts; grad_w is identical on every part afterwards.
TrainStepResult coop_train_step(const Graph& g, const PartitionMap& pm,
                                const std::vector<std::vector<VertexId>>& per_pe_seeds,
                                int num_layers, const SamplerConfig& cfg,
                                const SeedSchedule& schedule, const GcnModel& model,
                                const FeatureStore& store);

/// Independent baseline step: per-part expansion, per-part feature loading
/// (overlapping rows loaded once per part that needs them), no communication;
/// gradients are summed across parts at the end.
TrainStepResult indep_train_step(const Graph& g,
                                 const std::vector<std::vector<VertexId>>& per_pe_seeds,
                                 int num_layers, const SamplerConfig& cfg,
                                 const SeedSchedule& schedule, const GcnModel& model,
                                 const FeatureStore& store);

}  // namespace coopbatch
