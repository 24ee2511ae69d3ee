#include "coopbatch/coop.hpp"

#include <algorithm>
#include <cmath>

#include "coopbatch/parallel.hpp"

namespace coopbatch {

std::uint64_t ExchangeRecord::communicated(std::uint32_t p) const {
  std::uint64_t total = 0;
  for (std::uint32_t q = 0; q < num_parts(); ++q)
    if (q != p) total += send_counts[p][q];
  return total;
}

std::uint64_t ExchangeRecord::total_communicated() const {
  std::uint64_t total = 0;
  for (std::uint32_t p = 0; p < num_parts(); ++p) total += communicated(p);
  return total;
}

namespace {

ExchangeRecord build_exchange(const std::vector<BipartiteBlock>& blocks,
                              const PartitionMap& pm, int layer,
                              std::vector<std::vector<VertexId>>* next_seeds) {
  const std::uint32_t parts = pm.num_parts;
  ExchangeRecord rec;
  rec.layer = layer;
  rec.send_counts.assign(parts, std::vector<std::uint64_t>(parts, 0));
  rec.src_location.resize(parts);
  rec.owner_row_counts.assign(parts, 0);

  // Route every sampled source id to its owner and deduplicate there.
  std::vector<std::vector<VertexId>> received(parts);
  for (std::uint32_t p = 0; p < parts; ++p) {
    for (const VertexId v : blocks[p].src_vertices) {
      const std::uint32_t q = pm.owner[v];
      rec.send_counts[p][q] += 1;
      received[q].push_back(v);
    }
  }
  next_seeds->resize(parts);
  for (std::uint32_t q = 0; q < parts; ++q) {
    auto& ids = received[q];
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    (*next_seeds)[q] = std::move(ids);
    rec.owner_row_counts[q] = (*next_seeds)[q].size();
  }

  for (std::uint32_t p = 0; p < parts; ++p) {
    auto& loc = rec.src_location[p];
    loc.reserve(blocks[p].src_vertices.size());
    for (const VertexId v : blocks[p].src_vertices) {
      const std::uint32_t q = pm.owner[v];
      const auto& owned = (*next_seeds)[q];
      const auto it = std::lower_bound(owned.begin(), owned.end(), v);
      loc.push_back({q, static_cast<std::uint64_t>(it - owned.begin())});
    }
  }
  return rec;
}

}  // namespace

CoopSampleResult coop_sample(const Graph& g, const PartitionMap& pm,
                             const std::vector<std::vector<VertexId>>& per_pe_seeds,
                             int num_layers, const SamplerConfig& cfg,
                             const SeedSchedule& schedule) {
  const std::uint32_t parts = pm.num_parts;
  if (per_pe_seeds.size() != parts)
    throw InputError("coop_sample: seed lists must match the partition count");
  validate_partition(pm, g.num_vertices);
  for (std::uint32_t p = 0; p < parts; ++p)
    for (const VertexId s : per_pe_seeds[p]) {
      g.check_vertex(s);
      if (pm.owner[s] != p)
        throw InputError("coop_sample: seed " + std::to_string(s) +
                         " is not owned by part " + std::to_string(p));
    }
  if (num_layers < 1) throw InputError("coop_sample: num_layers must be >= 1");

  const VariateSource source = VariateSource::from_schedule(schedule);
  CoopSampleResult result;
  result.stacks.resize(parts);
  result.exchanges.reserve(num_layers);

  std::vector<std::vector<VertexId>> cur = per_pe_seeds;
  std::vector<BipartiteBlock> layer_blocks(parts);
  for (int l = 0; l < num_layers; ++l) {
    // Sampling stage: every part expands only the seeds it owns.
    parallel_for(parts, [&](std::size_t p) {
      layer_blocks[p] = sample_block(g, cur[p], cfg, source, l);
    });
    // Rendezvous: redistribute sampled ids to their owners.
    std::vector<std::vector<VertexId>> next;
    result.exchanges.push_back(build_exchange(layer_blocks, pm, l, &next));
    for (std::uint32_t p = 0; p < parts; ++p)
      result.stacks[p].blocks.push_back(std::move(layer_blocks[p]));
    cur = std::move(next);
  }
  result.owner_sets = std::move(cur);
  return result;
}

std::vector<LayerStack> indep_sample(const Graph& g,
                                     const std::vector<std::vector<VertexId>>& per_pe_seeds,
                                     int num_layers, const SamplerConfig& cfg,
                                     const SeedSchedule& schedule) {
  std::vector<LayerStack> stacks(per_pe_seeds.size());
  for (const auto& seeds : per_pe_seeds)
    for (const VertexId s : seeds) g.check_vertex(s);
  parallel_for(per_pe_seeds.size(), [&](std::size_t p) {
    stacks[p] = expand(g, per_pe_seeds[p], num_layers, cfg, schedule);
  });
  return stacks;
}

namespace {

void check_owner_rows(const ExchangeRecord& rec,
                      const std::vector<std::vector<double>>& rows,
                      std::uint32_t dim, const char* what) {
  if (rows.size() != rec.num_parts())
    throw InputError(std::string(what) + ": part count mismatch");
  for (std::uint32_t q = 0; q < rec.num_parts(); ++q)
    if (rows[q].size() != rec.owner_row_counts[q] * dim)
      throw InputError(std::string(what) + ": owner payload shape mismatch");
}

void check_requester_rows(const ExchangeRecord& rec,
                          const std::vector<std::vector<double>>& rows,
                          std::uint32_t dim, const char* what) {
  if (rows.size() != rec.num_parts())
    throw InputError(std::string(what) + ": part count mismatch");
  for (std::uint32_t p = 0; p < rec.num_parts(); ++p)
    if (rows[p].size() != rec.src_location[p].size() * dim)
      throw InputError(std::string(what) + ": requester payload shape mismatch");
}

}  // namespace

std::vector<std::vector<double>> all_to_all_forward(
    const ExchangeRecord& rec, const std::vector<std::vector<double>>& owner_rows,
    std::uint32_t dim) {
  check_owner_rows(rec, owner_rows, dim, "all_to_all_forward");
  std::vector<std::vector<double>> out(rec.num_parts());
  for (std::uint32_t p = 0; p < rec.num_parts(); ++p) {
    const auto& loc = rec.src_location[p];
    out[p].resize(loc.size() * dim);
    for (std::size_t j = 0; j < loc.size(); ++j) {
      const double* src = owner_rows[loc[j].part].data() + loc[j].row * dim;
      std::copy(src, src + dim, out[p].data() + j * dim);
    }
  }
  return out;
}

std::vector<std::vector<double>> all_to_all_reverse(
    const ExchangeRecord& rec,
    const std::vector<std::vector<double>>& requester_rows, std::uint32_t dim) {
  check_requester_rows(rec, requester_rows, dim, "all_to_all_reverse");
  std::vector<std::vector<double>> out(rec.num_parts());
  for (std::uint32_t q = 0; q < rec.num_parts(); ++q)
    out[q].assign(rec.owner_row_counts[q] * dim, 0.0);
  for (std::uint32_t p = 0; p < rec.num_parts(); ++p) {
    const auto& loc = rec.src_location[p];
    for (std::size_t j = 0; j < loc.size(); ++j) {
      const double* src = requester_rows[p].data() + j * dim;
      std::copy(src, src + dim, out[loc[j].part].data() + loc[j].row * dim);
    }
  }
  return out;
}

std::vector<std::vector<double>> all_to_all_reverse_sum(
    const ExchangeRecord& rec,
    const std::vector<std::vector<double>>& requester_rows, std::uint32_t dim) {
  check_requester_rows(rec, requester_rows, dim, "all_to_all_reverse_sum");
  std::vector<std::vector<double>> out(rec.num_parts());
  for (std::uint32_t q = 0; q < rec.num_parts(); ++q)
    out[q].assign(rec.owner_row_counts[q] * dim, 0.0);
  for (std::uint32_t p = 0; p < rec.num_parts(); ++p) {
    const auto& loc = rec.src_location[p];
    for (std::size_t j = 0; j < loc.size(); ++j) {
      const double* src = requester_rows[p].data() + j * dim;
      double* dst = out[loc[j].part].data() + loc[j].row * dim;
      for (std::uint32_t k = 0; k < dim; ++k) dst[k] += src[k];
    }
  }
  return out;
}

namespace {

std::vector<std::uint32_t> in_degrees(const BipartiteBlock& block) {
  std::vector<std::uint32_t> deg(block.dst_vertices.size(), 0);
  for (const auto& [si, di] : block.edges) deg[di] += 1;
  return deg;
}

/// Mean-aggregate sampled in-neighbors per destination; isolated destinations
/// fall back to their own source row.
std::vector<double> aggregate(const BipartiteBlock& block,
                              const FeatureMatrix& h_in) {
  const std::uint32_t dim = h_in.dim;
  const std::size_t n_dst = block.dst_vertices.size();
  std::vector<double> agg(n_dst * dim, 0.0);
  const auto deg = in_degrees(block);
  for (const auto& [si, di] : block.edges) {
    const double* src = h_in.row(si);
    double* dst = agg.data() + static_cast<std::size_t>(di) * dim;
    for (std::uint32_t k = 0; k < dim; ++k) dst[k] += src[k];
  }
  for (std::size_t di = 0; di < n_dst; ++di) {
    double* dst = agg.data() + di * dim;
    if (deg[di] > 0) {
      const double inv = 1.0 / static_cast<double>(deg[di]);
      for (std::uint32_t k = 0; k < dim; ++k) dst[k] *= inv;
    } else {
      const double* self = h_in.row(block.dst_pos_in_src[di]);
      std::copy(self, self + dim, dst);
    }
  }
  return agg;
}

void check_forward_shapes(const BipartiteBlock& block, const FeatureMatrix& h_in,
                          const DenseMatrix& w) {
  if (h_in.rows() != block.src_vertices.size())
    throw InputError("gcn: input rows do not align with block sources");
  if (w.rows != h_in.dim)
    throw InputError("gcn: weight rows do not match input dim");
}

}  // namespace

FeatureMatrix gcn_forward(const BipartiteBlock& block, const FeatureMatrix& h_in,
                          const DenseMatrix& w, Activation act) {
  check_forward_shapes(block, h_in, w);
  const std::size_t n_dst = block.dst_vertices.size();
  const auto agg = aggregate(block, h_in);

  FeatureMatrix out;
  out.row_ids = block.dst_vertices;
  out.dim = static_cast<std::uint32_t>(w.cols);
  out.values.assign(n_dst * w.cols, 0.0);
  for (std::size_t r = 0; r < n_dst; ++r) {
    const double* a = agg.data() + r * h_in.dim;
    double* o = out.row(r);
    for (std::uint32_t i = 0; i < h_in.dim; ++i) {
      const double ai = a[i];
      if (ai == 0.0) continue;
      const double* wrow = w.data.data() + static_cast<std::size_t>(i) * w.cols;
      for (std::uint64_t j = 0; j < w.cols; ++j) o[j] += ai * wrow[j];
    }
    if (act == Activation::kTanh)
      for (std::uint64_t j = 0; j < w.cols; ++j) o[j] = std::tanh(o[j]);
  }
  return out;
}

GcnBackwardResult gcn_backward(const BipartiteBlock& block,
                               const FeatureMatrix& h_in, const DenseMatrix& w,
                               const FeatureMatrix& grad_out, Activation act) {
  check_forward_shapes(block, h_in, w);
  const std::size_t n_dst = block.dst_vertices.size();
  if (grad_out.rows() != n_dst || grad_out.dim != w.cols)
    throw InputError("gcn_backward: grad_out shape mismatch");

  const auto agg = aggregate(block, h_in);
  const auto deg = in_degrees(block);

  // d(pre-activation): recompute the forward linear map, invert tanh locally.
  std::vector<double> dpre(grad_out.values);
  if (act == Activation::kTanh) {
    for (std::size_t r = 0; r < n_dst; ++r) {
      const double* a = agg.data() + r * h_in.dim;
      double* dp = dpre.data() + r * w.cols;
      for (std::uint64_t j = 0; j < w.cols; ++j) {
        double pre = 0.0;
        for (std::uint32_t i = 0; i < h_in.dim; ++i)
          pre += a[i] * w.at(i, j);
        const double t = std::tanh(pre);
        dp[j] *= 1.0 - t * t;
      }
    }
  }

  GcnBackwardResult result;
  result.grad_w = DenseMatrix::zeros(w.rows, w.cols);
  for (std::size_t r = 0; r < n_dst; ++r) {
    const double* a = agg.data() + r * h_in.dim;
    const double* dp = dpre.data() + r * w.cols;
    for (std::uint32_t i = 0; i < h_in.dim; ++i) {
      if (a[i] == 0.0) continue;
      double* gw = result.grad_w.data.data() + static_cast<std::size_t>(i) * w.cols;
      for (std::uint64_t j = 0; j < w.cols; ++j) gw[j] += a[i] * dp[j];
    }
  }

  // grad wrt aggregated features, then scatter through the mean.
  std::vector<double> dagg(n_dst * h_in.dim, 0.0);
  for (std::size_t r = 0; r < n_dst; ++r) {
    const double* dp = dpre.data() + r * w.cols;
    double* da = dagg.data() + r * h_in.dim;
    for (std::uint32_t i = 0; i < h_in.dim; ++i) {
      const double* wrow = w.data.data() + static_cast<std::size_t>(i) * w.cols;
      double acc = 0.0;
      for (std::uint64_t j = 0; j < w.cols; ++j) acc += dp[j] * wrow[j];
      da[i] = acc;
    }
  }

  result.grad_h_in.row_ids = block.src_vertices;
  result.grad_h_in.dim = h_in.dim;
  result.grad_h_in.values.assign(h_in.values.size(), 0.0);
  for (const auto& [si, di] : block.edges) {
    const double inv = 1.0 / static_cast<double>(deg[di]);
    const double* da = dagg.data() + static_cast<std::size_t>(di) * h_in.dim;
    double* gh = result.grad_h_in.row(si);
    for (std::uint32_t k = 0; k < h_in.dim; ++k) gh[k] += da[k] * inv;
  }
  for (std::size_t di = 0; di < n_dst; ++di) {
    if (deg[di] > 0) continue;
    const double* da = dagg.data() + di * h_in.dim;
    double* gh = result.grad_h_in.row(block.dst_pos_in_src[di]);
    for (std::uint32_t k = 0; k < h_in.dim; ++k) gh[k] += da[k];
  }
  return result;
}

GcnModel GcnModel::init(std::uint32_t in_dim, std::uint32_t hidden,
                        std::uint32_t num_classes, int num_layers,
                        std::uint64_t seed) {
  if (num_layers < 1) throw InputError("GcnModel: num_layers must be >= 1");
  GcnModel m;
  m.weights.resize(num_layers);
  for (int l = 0; l < num_layers; ++l) {
    // weights[l] is consumed at block l; block num_layers-1 reads raw inputs.
    const std::uint32_t rows = (l == num_layers - 1) ? in_dim : hidden;
    const std::uint32_t cols = (l == 0) ? num_classes : hidden;
    DenseMatrix w = DenseMatrix::zeros(rows, cols);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
    for (std::uint64_t i = 0; i < w.rows; ++i)
      for (std::uint64_t j = 0; j < w.cols; ++j)
        w.at(i, j) =
            (2.0 * hash_uniform(seed, {kStreamWeightInit,
                                       static_cast<std::uint64_t>(l), i, j}) -
             1.0) *
            scale;
    m.weights[l] = std::move(w);
  }
  return m;
}

FeatureStore FeatureStore::synth(std::uint64_t num_vertices, std::uint32_t dim,
                                 std::uint32_t num_classes, std::uint64_t seed,
                                 std::uint32_t bytes_per_scalar) {
  FeatureStore fs;
  fs.dim = dim;
  fs.num_classes = num_classes;
  fs.bytes_per_scalar = bytes_per_scalar;
  fs.values.resize(num_vertices * dim);
  fs.labels.resize(num_vertices);
  for (std::uint64_t v = 0; v < num_vertices; ++v) {
    for (std::uint32_t j = 0; j < dim; ++j)
      fs.values[v * dim + j] =
          2.0 * hash_uniform(seed, {kStreamFeature, v, j}) - 1.0;
    fs.labels[v] = static_cast<std::uint32_t>(
        hash_bits(seed, {kStreamLabel, v}) % num_classes);
  }
  return fs;
}

FeatureMatrix FeatureStore::load_rows(std::span<const VertexId> ids) const {
  FeatureMatrix m;
  m.row_ids.assign(ids.begin(), ids.end());
  m.dim = dim;
  m.values.resize(ids.size() * dim);
  for (std::size_t r = 0; r < ids.size(); ++r)
    std::copy(values.data() + static_cast<std::uint64_t>(ids[r]) * dim,
              values.data() + static_cast<std::uint64_t>(ids[r]) * dim + dim,
              m.values.data() + r * dim);
  return m;
}

namespace {

/// Softmax cross-entropy over logits rows; grad rows are scaled by `scale`
/// (the global 1/N of the mean loss).
double softmax_ce(const FeatureMatrix& logits, const FeatureStore& store,
                  double scale, FeatureMatrix* grad) {
  grad->row_ids = logits.row_ids;
  grad->dim = logits.dim;
  grad->values.assign(logits.values.size(), 0.0);
  double loss_sum = 0.0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const double* z = logits.row(r);
    double* gz = grad->row(r);
    double zmax = z[0];
    for (std::uint32_t j = 1; j < logits.dim; ++j) zmax = std::max(zmax, z[j]);
    double denom = 0.0;
    for (std::uint32_t j = 0; j < logits.dim; ++j) denom += std::exp(z[j] - zmax);
    const std::uint32_t label = store.labels[logits.row_ids[r]];
    loss_sum += std::log(denom) - (z[label] - zmax);
    for (std::uint32_t j = 0; j < logits.dim; ++j) {
      const double p = std::exp(z[j] - zmax) / denom;
      gz[j] = (p - (j == label ? 1.0 : 0.0)) * scale;
    }
  }
  return loss_sum;
}

Activation act_for_layer(const GcnModel& model, int l) {
  return l == 0 ? Activation::kIdentity : model.hidden_activation;
}

void check_model(const GcnModel& model, int num_layers, const FeatureStore& store) {
  if (static_cast<int>(model.weights.size()) != num_layers)
    throw InputError("train step: model depth does not match layer count");
  if (model.weights.back().rows != store.dim)
    throw InputError("train step: model input dim does not match store");
}

std::vector<LayerMetrics> block_metrics(const LayerStack& stack) {
  std::vector<LayerMetrics> out;
  out.reserve(stack.blocks.size());
  for (const auto& b : stack.blocks)
    out.push_back({b.dst_vertices.size(), b.src_vertices.size(), b.num_edges(), 0});
  return out;
}

}  // namespace

TrainStepResult coop_train_step(const Graph& g, const PartitionMap& pm,
                                const std::vector<std::vector<VertexId>>& per_pe_seeds,
                                int num_layers, const SamplerConfig& cfg,
                                const SeedSchedule& schedule, const GcnModel& model,
                                const FeatureStore& store) {
  check_model(model, num_layers, store);
  const std::uint32_t parts = pm.num_parts;
  auto sampled = coop_sample(g, pm, per_pe_seeds, num_layers, cfg, schedule);

  std::uint64_t total_seeds = 0;
  for (const auto& s : per_pe_seeds) total_seeds += s.size();
  if (total_seeds == 0) throw InputError("coop_train_step: no seeds");

  TrainStepResult result;
  result.metrics.per_pe.resize(parts);

  // Feature loading: every part loads only the input rows it owns, then the
  // cached exchange fans them out to the parts that sampled them.
  std::vector<std::vector<double>> owner_rows(parts);
  for (std::uint32_t p = 0; p < parts; ++p) {
    FeatureMatrix rows = store.load_rows(sampled.owner_sets[p]);
    result.metrics.per_pe[p].feat_bytes = store.bytes_for(rows.rows());
    result.metrics.per_pe[p].input_rows = rows.rows();
    owner_rows[p] = std::move(rows.values);
  }

  // Forward: h_tilde[p] is requester-aligned input for block l of part p.
  std::vector<std::vector<std::vector<double>>> h_tilde(num_layers);
  h_tilde[num_layers - 1] =
      all_to_all_forward(sampled.exchanges[num_layers - 1], owner_rows, store.dim);

  std::vector<FeatureMatrix> h_dst(parts);
  for (int l = num_layers - 1; l >= 0; --l) {
    const std::uint32_t in_dim =
        static_cast<std::uint32_t>(model.weights[l].rows);
    parallel_for(parts, [&](std::size_t p) {
      const auto& block = sampled.stacks[p].blocks[l];
      FeatureMatrix h_in;
      h_in.row_ids = block.src_vertices;
      h_in.dim = in_dim;
      h_in.values = h_tilde[l][p];
      h_dst[p] = gcn_forward(block, h_in, model.weights[l],
                             act_for_layer(model, l));
    });
    if (l > 0) {
      std::vector<std::vector<double>> owner_aligned(parts);
      for (std::uint32_t p = 0; p < parts; ++p)
        owner_aligned[p] = h_dst[p].values;
      h_tilde[l - 1] =
          all_to_all_forward(sampled.exchanges[l - 1], owner_aligned,
                             static_cast<std::uint32_t>(model.weights[l].cols));
    }
  }

  // Loss on the seeds, gradients scaled by the global mean.
  const double scale = 1.0 / static_cast<double>(total_seeds);
  double loss_sum = 0.0;
  std::vector<FeatureMatrix> grad_dst(parts);
  for (std::uint32_t p = 0; p < parts; ++p)
    loss_sum += softmax_ce(h_dst[p], store, scale, &grad_dst[p]);
  result.loss = loss_sum * scale;

  // Backward with owner-side gradient accumulation between layers.
  result.grad_w.reserve(num_layers);
  for (const auto& w : model.weights)
    result.grad_w.push_back(DenseMatrix::zeros(w.rows, w.cols));

  std::vector<std::vector<double>> grad_rows(parts);
  for (std::uint32_t p = 0; p < parts; ++p)
    grad_rows[p] = std::move(grad_dst[p].values);

  for (int l = 0; l < num_layers; ++l) {
    const std::uint32_t in_dim =
        static_cast<std::uint32_t>(model.weights[l].rows);
    const std::uint32_t out_dim =
        static_cast<std::uint32_t>(model.weights[l].cols);
    std::vector<GcnBackwardResult> back(parts);
    parallel_for(parts, [&](std::size_t p) {
      const auto& block = sampled.stacks[p].blocks[l];
      FeatureMatrix h_in;
      h_in.row_ids = block.src_vertices;
      h_in.dim = in_dim;
      h_in.values = h_tilde[l][p];
      FeatureMatrix grad_out;
      grad_out.row_ids = block.dst_vertices;
      grad_out.dim = out_dim;
      grad_out.values = std::move(grad_rows[p]);
      back[p] = gcn_backward(block, h_in, model.weights[l], grad_out,
                             act_for_layer(model, l));
    });
    // Simulated gradient all-reduce: exact summation over parts.
    for (std::uint32_t p = 0; p < parts; ++p)
      for (std::size_t i = 0; i < result.grad_w[l].data.size(); ++i)
        result.grad_w[l].data[i] += back[p].grad_w.data[i];

    if (l + 1 < num_layers) {
      std::vector<std::vector<double>> requester(parts);
      for (std::uint32_t p = 0; p < parts; ++p)
        requester[p] = std::move(back[p].grad_h_in.values);
      grad_rows = all_to_all_reverse_sum(sampled.exchanges[l], requester, in_dim);
    }
  }

  for (std::uint32_t p = 0; p < parts; ++p) {
    result.metrics.per_pe[p].layers = block_metrics(sampled.stacks[p]);
    for (int l = 0; l < num_layers; ++l)
      result.metrics.per_pe[p].layers[l].comm_vertices =
          sampled.exchanges[l].communicated(p);
  }
  result.metrics.loss = result.loss;
  return result;
}

TrainStepResult indep_train_step(const Graph& g,
                                 const std::vector<std::vector<VertexId>>& per_pe_seeds,
                                 int num_layers, const SamplerConfig& cfg,
                                 const SeedSchedule& schedule, const GcnModel& model,
                                 const FeatureStore& store) {
  check_model(model, num_layers, store);
  const std::uint32_t parts = static_cast<std::uint32_t>(per_pe_seeds.size());
  if (parts == 0) throw InputError("indep_train_step: no parts");

  auto stacks = indep_sample(g, per_pe_seeds, num_layers, cfg, schedule);

  std::uint64_t total_seeds = 0;
  for (const auto& s : per_pe_seeds) total_seeds += s.size();
  if (total_seeds == 0) throw InputError("indep_train_step: no seeds");
  const double scale = 1.0 / static_cast<double>(total_seeds);

  TrainStepResult result;
  result.metrics.per_pe.resize(parts);
  result.grad_w.reserve(num_layers);
  for (const auto& w : model.weights)
    result.grad_w.push_back(DenseMatrix::zeros(w.rows, w.cols));

  std::vector<double> losses(parts, 0.0);
  std::vector<std::vector<DenseMatrix>> grads(parts);

  parallel_for(parts, [&](std::size_t p) {
    const LayerStack& stack = stacks[p];
    std::vector<FeatureMatrix> h(num_layers + 1);
    h[num_layers] = store.load_rows(stack.input_vertices());
    result.metrics.per_pe[p].feat_bytes = store.bytes_for(h[num_layers].rows());
    result.metrics.per_pe[p].input_rows = h[num_layers].rows();

    for (int l = num_layers - 1; l >= 0; --l)
      h[l] = gcn_forward(stack.blocks[l], h[l + 1], model.weights[l],
                         act_for_layer(model, l));

    FeatureMatrix grad;
    losses[p] = softmax_ce(h[0], store, scale, &grad);

    grads[p].reserve(num_layers);
    for (int l = 0; l < num_layers; ++l) {
      auto back = gcn_backward(stack.blocks[l], h[l + 1], model.weights[l],
                               grad, act_for_layer(model, l));
      grads[p].push_back(std::move(back.grad_w));
      grad = std::move(back.grad_h_in);
    }
    result.metrics.per_pe[p].layers = block_metrics(stack);
  });

  double loss_sum = 0.0;
  for (std::uint32_t p = 0; p < parts; ++p) {
    loss_sum += losses[p];
    for (int l = 0; l < num_layers; ++l)
      for (std::size_t i = 0; i < result.grad_w[l].data.size(); ++i)
        result.grad_w[l].data[i] += grads[p][l].data[i];
  }
  result.loss = loss_sum * scale;
  result.metrics.loss = result.loss;
  return result;
}

}  // namespace coopbatch
