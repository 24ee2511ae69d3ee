#include "coopbatch/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "coopbatch/analysis.hpp"
#include "coopbatch/cache.hpp"
#include "coopbatch/coop.hpp"
#include "coopbatch/graph.hpp"
#include "coopbatch/partition.hpp"

namespace coopbatch {

namespace {

std::string kappa_str(std::uint64_t kappa) {
  return kappa == kKappaInfinity ? "inf" : std::to_string(kappa);
}

std::uint64_t parse_kappa(const std::string& s) {
  if (s == "inf" || s == "infinity") return kKappaInfinity;
  std::uint64_t v = 0;
  std::istringstream ss(s);
  if (!(ss >> v) || !ss.eof() || v == 0)
    throw CLI::ValidationError("--kappa", "must be a positive integer or 'inf'");
  return v;
}

SamplerKind parse_sampler(const std::string& s) {
  if (s == "ns") return SamplerKind::kNs;
  if (s == "labor0") return SamplerKind::kLabor0;
  if (s == "rw") return SamplerKind::kRw;
  if (s == "full") return SamplerKind::kFull;
  throw CLI::ValidationError("--sampler", "must be ns|labor0|rw|full");
}

std::string sampler_str(SamplerKind k) {
  switch (k) {
    case SamplerKind::kNs: return "ns";
    case SamplerKind::kLabor0: return "labor0";
    case SamplerKind::kRw: return "rw";
    case SamplerKind::kFull: return "full";
  }
  return "?";
}

GenerateSpec parse_generate_spec(const std::string& spec) {
  GenerateSpec out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--generate", "expected key=value list");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      if (key == "n") out.n = std::stoull(val);
      else if (key == "deg") out.deg = std::stod(val);
      else if (key == "skew") out.skew = std::stod(val);
      else
        throw CLI::ValidationError("--generate", "unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw CLI::ValidationError("--generate", "bad value for '" + key + "'");
    }
  }
  return out;
}

/// Column-preserving atomic CSV writer: temp file in place, then rename.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const RunConfig& cfg) : path_(path) {
    if (path.empty()) return;
    tmp_ = path + ".tmp";
    out_.open(tmp_, std::ios::trunc);
    if (!out_) throw IoError("cannot open for write: " + tmp_);
    for (const auto& [k, v] : cfg.resolved()) out_ << "# " << k << "=" << v << "\n";
  }

  bool enabled() const { return !path_.empty(); }
  std::ostream& stream() { return out_; }

  void finish() {
    if (path_.empty()) return;
    out_.flush();
    if (!out_) throw IoError("write failed: " + tmp_);
    out_.close();
    if (std::rename(tmp_.c_str(), path_.c_str()) != 0)
      throw IoError("rename failed: " + path_);
  }

 private:
  std::string path_, tmp_;
  std::ofstream out_;
};

Graph load_graph(const RunConfig& cfg) {
  if (cfg.generate) {
    const auto& gs = *cfg.generate;
    return generate_powerlaw(gs.n, gs.deg, gs.skew, cfg.seed);
  }
  std::ifstream probe(cfg.graph_path, std::ios::binary);
  if (!probe) throw IoError("cannot open graph file: " + cfg.graph_path);
  char magic[4] = {0, 0, 0, 0};
  probe.read(magic, 4);
  probe.close();
  if (magic[0] == 'C' && magic[1] == 'B' && magic[2] == 'C' && magic[3] == 'S')
    return load_csr(cfg.graph_path);
  return load_edge_list(cfg.graph_path, cfg.num_vertices_override);
}

PartitionMap make_partition(const RunConfig& cfg, const Graph& g) {
  if (cfg.partitioner == "locality") return partition_locality(g, cfg.parts);
  return partition_random(g.num_vertices, cfg.parts, cfg.seed);
}

std::vector<VertexId> draw_from_pool(const std::vector<VertexId>& pool,
                                     std::uint64_t count, std::uint64_t seed,
                                     std::uint64_t tag) {
  if (count > pool.size())
    throw InputError("not enough vertices in pool to draw batch");
  std::vector<VertexId> out;
  out.reserve(count);
  std::vector<bool> used(pool.size(), false);
  std::uint64_t attempt = 0;
  while (out.size() < count) {
    const double u = hash_uniform(seed, {kStreamSeedDraw, tag, attempt++});
    auto i = static_cast<std::size_t>(u * static_cast<double>(pool.size()));
    if (i >= pool.size()) i = pool.size() - 1;
    if (used[i]) continue;
    used[i] = true;
    out.push_back(pool[i]);
  }
  return out;
}

int run_generate(const RunConfig& cfg) {
  const Graph g = load_graph(cfg);
  if (cfg.out_path.empty()) throw InputError("generate: --out is required");
  save_csr(g, cfg.out_path);
  std::uint64_t max_deg = 0;
  for (VertexId v = 0; v < g.num_vertices; ++v)
    max_deg = std::max<std::uint64_t>(max_deg, g.degree(v));
  std::cout << "vertices=" << g.num_vertices << " edges=" << g.num_edges()
            << " max_in_degree=" << max_deg << " -> " << cfg.out_path << "\n";
  return kExitOk;
}

int run_partition(const RunConfig& cfg) {
  const Graph g = load_graph(cfg);
  const PartitionMap pm = make_partition(cfg, g);
  const double c = cross_edge_ratio(g, pm);
  CsvWriter csv(cfg.csv_path, cfg);
  if (csv.enabled()) {
    csv.stream() << "vertex,part\n";
    for (std::uint64_t v = 0; v < g.num_vertices; ++v)
      csv.stream() << v << "," << pm.owner[v] << "\n";
    csv.finish();
  }
  std::cout << "parts=" << cfg.parts << " partitioner=" << cfg.partitioner
            << " cross_edge_ratio=" << c << "\n";
  return kExitOk;
}

int run_curve(const RunConfig& cfg) {
  Graph g = load_graph(cfg);
  const SeedMode mode =
      cfg.seed_mode == "edge" ? SeedMode::kEdge : SeedMode::kNode;
  if (mode == SeedMode::kEdge) g = make_undirected(g);

  std::vector<std::uint64_t> sizes = cfg.batch_sizes;
  if (sizes.empty())
    for (std::uint64_t b = 64; b <= 8192; b *= 2) sizes.push_back(b);

  const WorkCurve curve =
      work_curve(g, cfg.sampler, sizes, cfg.trials, cfg.layers, cfg.seed, mode);

  CsvWriter csv(cfg.csv_path, cfg);
  std::ostream& out = csv.enabled() ? csv.stream() : std::cout;
  out << "batch_size,mean_s" << cfg.layers << ",se_s" << cfg.layers
      << ",work_per_seed\n";
  for (const auto& pt : curve.points)
    out << pt.batch_size << "," << pt.mean_sl << "," << pt.se_sl << ","
        << pt.work_per_seed << "\n";
  csv.finish();
  return kExitOk;
}

int run_run(const RunConfig& cfg) {
  const Graph g = load_graph(cfg);
  const PartitionMap pm = make_partition(cfg, g);
  const auto members = part_members(pm);
  const std::uint64_t per_pe = std::max<std::uint64_t>(1, cfg.batch / cfg.parts);

  const FeatureStore store = FeatureStore::synth(
      g.num_vertices, cfg.feature_dim, cfg.num_classes, cfg.seed,
      cfg.bytes_per_scalar);
  const GcnModel model = GcnModel::init(cfg.feature_dim, cfg.hidden_dim,
                                        cfg.num_classes, cfg.layers, cfg.seed);
  SeedSchedule schedule = SeedSchedule::make(cfg.kappa, cfg.seed);

  CsvWriter csv(cfg.csv_path, cfg);
  std::ostream& out = csv.enabled() ? csv.stream() : std::cout;
  out << "step,mode,pe,layer,s_l,s_tilde_l,e_l,comm_vertices,feat_bytes,loss\n";

  for (std::uint64_t step = 0; step < cfg.steps; ++step) {
    std::vector<std::vector<VertexId>> seeds(cfg.parts);
    for (std::uint32_t p = 0; p < cfg.parts; ++p)
      seeds[p] = draw_from_pool(members[p], std::min<std::uint64_t>(per_pe, members[p].size()),
                                cfg.seed, hash_bits(step, {p}));

    const TrainStepResult r =
        cfg.run_mode == "coop"
            ? coop_train_step(g, pm, seeds, cfg.layers, cfg.sampler, schedule,
                              model, store)
            : indep_train_step(g, seeds, cfg.layers, cfg.sampler, schedule,
                               model, store);
    schedule = schedule_advance(schedule);

    for (std::uint32_t p = 0; p < cfg.parts; ++p) {
      const auto& pe = r.metrics.per_pe[p];
      for (std::size_t l = 0; l < pe.layers.size(); ++l) {
        const auto& lm = pe.layers[l];
        out << step << "," << cfg.run_mode << "," << p << "," << l << ","
            << lm.s_l << "," << lm.s_tilde_l << "," << lm.e_l << ","
            << lm.comm_vertices << ","
            << (l + 1 == pe.layers.size() ? pe.feat_bytes : 0) << "," << r.loss
            << "\n";
      }
    }
  }
  csv.finish();
  return kExitOk;
}

int run_cache(const RunConfig& cfg) {
  const Graph g = load_graph(cfg);
  MinibatchSchedule sched;
  sched.kappa = cfg.kappa;
  sched.batch_size = cfg.batch;
  if (cfg.batch_mode == "nested") sched.mode = BatchMode::kNested;
  else if (cfg.batch_mode == "smoothed") sched.mode = BatchMode::kSmoothed;
  else sched.mode = BatchMode::kIndependent;
  if (sched.mode == BatchMode::kIndependent) sched.kappa = 1;

  const auto result = run_dependent_experiment(
      g, sched, cfg.steps, cfg.cache_capacity, cfg.sampler, cfg.layers,
      cfg.feature_dim, cfg.bytes_per_scalar, cfg.seed);

  CsvWriter csv(cfg.csv_path, cfg);
  std::ostream& out = csv.enabled() ? csv.stream() : std::cout;
  out << "step,miss_rate,s_l,bytes\n";
  for (const auto& row : result.rows)
    out << row.step << "," << row.miss_rate << "," << row.s_l << ","
        << row.bytes << "\n";
  csv.finish();
  std::cout << "steady_miss_rate=" << result.steady_miss_rate
            << " warmup_steps=" << result.warmup_steps << "\n";
  return kExitOk;
}

int run_verify(const RunConfig& cfg) {
  std::uint64_t violations = 0, trials = 0;
  if (cfg.random_fixtures > 0) {
    for (std::uint32_t i = 0; i < cfg.random_fixtures; ++i) {
      const std::uint64_t n = 12 + (hash_bits(cfg.seed, {i, 1}) % 21);  // 12..32
      const double deg = 1.5 + 0.1 * static_cast<double>(hash_bits(cfg.seed, {i, 2}) % 20);
      const Graph g = generate_powerlaw(n, deg, 0.3, hash_bits(cfg.seed, {i, 3}));
      const auto rep =
          verify_identities(g, cfg.verify_n, cfg.verify_l, cfg.trials,
                            hash_bits(cfg.seed, {i, 4}));
      violations += rep.violations;
      trials += rep.trials;
      for (const auto& f : rep.failures) std::cerr << "fixture " << i << ": " << f << "\n";
    }
  } else {
    const Graph g = load_graph(cfg);
    const auto rep = verify_identities(g, cfg.verify_n, cfg.verify_l,
                                       cfg.trials, cfg.seed);
    violations = rep.violations;
    trials = rep.trials;
    for (const auto& f : rep.failures) std::cerr << f << "\n";
  }
  std::cout << "identity trials=" << trials << " violations=" << violations << "\n";
  return violations == 0 ? kExitOk : kExitVerifyFailed;
}

int run_cost(const RunConfig& cfg) {
  const Graph g = load_graph(cfg);
  const PartitionMap pm = make_partition(cfg, g);
  const auto members = part_members(pm);
  const std::uint64_t per_pe = std::max<std::uint64_t>(1, cfg.batch / cfg.parts);

  // Measure one profile of each pipeline with the same global batch.
  SizeProfile indep, coop;
  indep.layers.resize(cfg.layers);
  coop.layers.resize(cfg.layers);
  const std::uint32_t reps = std::max<std::uint32_t>(1, cfg.trials);
  for (std::uint32_t t = 0; t < reps; ++t) {
    std::vector<std::vector<VertexId>> seeds(cfg.parts);
    for (std::uint32_t p = 0; p < cfg.parts; ++p)
      seeds[p] = draw_from_pool(members[p],
                                std::min<std::uint64_t>(per_pe, members[p].size()),
                                cfg.seed, hash_bits(t, {p, 77}));
    SeedSchedule sched = SeedSchedule::make(1, hash_bits(cfg.seed, {t, 5}));

    const auto coop_res = coop_sample(g, pm, seeds, cfg.layers, cfg.sampler, sched);
    const auto indep_res = indep_sample(g, seeds, cfg.layers, cfg.sampler, sched);
    for (std::uint32_t p = 0; p < cfg.parts; ++p) {
      for (int l = 0; l < cfg.layers; ++l) {
        const auto& cb = coop_res.stacks[p].blocks[l];
        coop.layers[l].s_l += cb.dst_vertices.size();
        coop.layers[l].s_tilde_next += cb.src_vertices.size();
        coop.layers[l].e_l += cb.num_edges();
        const auto& ib = indep_res[p].blocks[l];
        indep.layers[l].s_l += ib.dst_vertices.size();
        indep.layers[l].s_tilde_next += ib.src_vertices.size();
        indep.layers[l].e_l += ib.num_edges();
      }
      coop.s_final += coop_res.owner_sets[p].size();
      indep.s_final += indep_res[p].input_vertices().size();
    }
  }
  const std::uint64_t denom = static_cast<std::uint64_t>(reps) * cfg.parts;
  for (int l = 0; l < cfg.layers; ++l) {
    coop.layers[l].s_l /= denom;
    coop.layers[l].s_tilde_next /= denom;
    coop.layers[l].e_l /= denom;
    indep.layers[l].s_l /= denom;
    indep.layers[l].s_tilde_next /= denom;
    indep.layers[l].e_l /= denom;
  }
  coop.s_final /= denom;
  indep.s_final /= denom;

  CostParams params;
  params.alpha = cfg.alpha;
  params.beta = cfg.beta;
  params.gamma = cfg.gamma;
  params.cross_edge_ratio = cfg.parts == 1 ? 0.0 : cross_edge_ratio(g, pm);
  params.feature_dim = cfg.feature_dim;
  params.cache_miss_rate = cfg.rho;
  params.model_cost = cfg.model_cost;
  params.parts = cfg.parts;

  const CostEstimate est = cost_estimate(params, indep, coop);
  CsvWriter csv(cfg.csv_path, cfg);
  std::ostream& out = csv.enabled() ? csv.stream() : std::cout;
  out << "stage,mode,modeled_time\n";
  out << "sampling,independent," << est.independent.sampling << "\n";
  out << "sampling,cooperative," << est.cooperative.sampling << "\n";
  out << "feature_loading,independent," << est.independent.feature_loading << "\n";
  out << "feature_loading,cooperative," << est.cooperative.feature_loading << "\n";
  out << "forward_backward,independent," << est.independent.forward_backward << "\n";
  out << "forward_backward,cooperative," << est.cooperative.forward_backward << "\n";
  out << "total,independent," << est.independent.total() << "\n";
  out << "total,cooperative," << est.cooperative.total() << "\n";
  csv.finish();
  return kExitOk;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> kv;
  const char* names[] = {"generate", "curve", "run", "cache", "verify", "cost", "partition"};
  kv.push_back({"subcommand", names[static_cast<int>(cmd)]});
  if (generate) {
    std::ostringstream ss;
    ss << "n=" << generate->n << ",deg=" << generate->deg
       << ",skew=" << generate->skew;
    kv.push_back({"generate", ss.str()});
  } else {
    kv.push_back({"graph", graph_path});
  }
  kv.push_back({"sampler", sampler_str(sampler.kind)});
  kv.push_back({"fanout", std::to_string(sampler.fanout)});
  kv.push_back({"rw_length", std::to_string(sampler.rw_length)});
  kv.push_back({"rw_restart", std::to_string(sampler.rw_restart)});
  kv.push_back({"rw_walks", std::to_string(sampler.rw_walks)});
  kv.push_back({"layers", std::to_string(layers)});
  kv.push_back({"seed", std::to_string(seed)});
  kv.push_back({"parts", std::to_string(parts)});
  kv.push_back({"partitioner", partitioner});
  kv.push_back({"kappa", kappa_str(kappa)});
  kv.push_back({"batch_mode", batch_mode});
  kv.push_back({"run_mode", run_mode});
  kv.push_back({"seed_mode", seed_mode});
  kv.push_back({"batch", std::to_string(batch)});
  kv.push_back({"steps", std::to_string(steps)});
  kv.push_back({"trials", std::to_string(trials)});
  kv.push_back({"cache_capacity", std::to_string(cache_capacity)});
  kv.push_back({"feature_dim", std::to_string(feature_dim)});
  kv.push_back({"hidden_dim", std::to_string(hidden_dim)});
  kv.push_back({"num_classes", std::to_string(num_classes)});
  kv.push_back({"bytes_per_scalar", std::to_string(bytes_per_scalar)});
  return kv;
}

RunConfig parse_and_validate(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"coopbatch: minibatch construction lab for sampled GNN training"};
  app.require_subcommand(1);

  std::string kappa_arg = "1";
  std::string sampler_arg = "ns";
  std::string generate_arg;
  std::uint64_t nv_override = 0;

  auto add_graph_source = [&](CLI::App* sub) {
    sub->add_option("--graph", cfg.graph_path, "graph file (CBCS binary or edge list)");
    sub->add_option("--generate", generate_arg,
                    "synthesize a graph: n=<count>,deg=<avg>,skew=<s>");
    sub->add_option("--num-vertices", nv_override,
                    "override vertex count for edge-list input");
  };
  auto add_sampler = [&](CLI::App* sub) {
    sub->add_option("--sampler", sampler_arg, "ns|labor0|rw|full");
    sub->add_option("--fanout", cfg.sampler.fanout, "per-vertex fanout k");
    sub->add_option("--rw-length", cfg.sampler.rw_length, "random walk length");
    sub->add_option("--rw-restart", cfg.sampler.rw_restart, "restart probability");
    sub->add_option("--rw-walks", cfg.sampler.rw_walks, "walks per seed");
    sub->add_option("--layers", cfg.layers, "GNN layer count");
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "global seed");
  };

  CLI::App* generate = app.add_subcommand("generate", "synthesize and save a graph");
  {
    GenerateSpec defaults;
    cfg.generate = defaults;
    generate->add_option("--n", cfg.generate->n, "vertex count");
    generate->add_option("--deg", cfg.generate->deg, "target average degree");
    generate->add_option("--skew", cfg.generate->skew, "degree skew");
    generate->add_option("--out", cfg.out_path, "output CBCS path")->required();
    add_seed(generate);
  }

  CLI::App* curve = app.add_subcommand("curve", "work-vs-batch-size curves");
  add_graph_source(curve);
  add_sampler(curve);
  add_seed(curve);
  curve->add_option("--batch-sizes", cfg.batch_sizes, "explicit batch size grid")
      ->delimiter(',');
  curve->add_option("--trials", cfg.trials, "trials per batch size");
  curve->add_option("--seed-mode", cfg.seed_mode, "node|edge prediction seeds");
  curve->add_option("--csv", cfg.csv_path, "output CSV");

  CLI::App* run = app.add_subcommand("run", "cooperative/independent training steps");
  add_graph_source(run);
  add_sampler(run);
  add_seed(run);
  run->add_option("--mode", cfg.run_mode, "coop|indep");
  run->add_option("--parts", cfg.parts, "number of PEs");
  run->add_option("--partitioner", cfg.partitioner, "random|locality");
  run->add_option("--batch", cfg.batch, "global batch size");
  run->add_option("--steps", cfg.steps, "training steps");
  run->add_option("--kappa", kappa_arg, "dependency period or 'inf'");
  run->add_option("--dim", cfg.feature_dim, "input feature dim");
  run->add_option("--hidden", cfg.hidden_dim, "hidden dim");
  run->add_option("--classes", cfg.num_classes, "label classes");
  run->add_option("--csv", cfg.csv_path, "output CSV");

  CLI::App* cache = app.add_subcommand("cache", "dependent-minibatch LRU experiment");
  add_graph_source(cache);
  add_sampler(cache);
  add_seed(cache);
  cache->add_option("--kappa", kappa_arg, "dependency period or 'inf'");
  cache->add_option("--capacity", cfg.cache_capacity, "cache rows");
  cache->add_option("--steps", cfg.steps, "steps to simulate");
  cache->add_option("--mode", cfg.batch_mode, "independent|nested|smoothed");
  cache->add_option("--batch", cfg.batch, "batch size");
  cache->add_option("--dim", cfg.feature_dim, "feature dim for byte counts");
  cache->add_option("--bytes-per-scalar", cfg.bytes_per_scalar, "2 or 4");
  cache->add_option("--csv", cfg.csv_path, "output CSV");

  CLI::App* verify = app.add_subcommand("verify", "exact identity verification");
  add_graph_source(verify);
  add_seed(verify);
  verify->add_option("--n", cfg.verify_n, "seed set size");
  verify->add_option("--l", cfg.verify_l, "expansion depth");
  verify->add_option("--trials", cfg.trials, "random batches (0 = exhaustive)");
  verify->add_option("--random-fixtures", cfg.random_fixtures,
                     "verify this many random small graphs instead");

  CLI::App* cost = app.add_subcommand("cost", "stage cost model comparison");
  add_graph_source(cost);
  add_sampler(cost);
  add_seed(cost);
  cost->add_option("--parts", cfg.parts, "number of PEs");
  cost->add_option("--partitioner", cfg.partitioner, "random|locality");
  cost->add_option("--batch", cfg.batch, "global batch size");
  cost->add_option("--trials", cfg.trials, "measurement repetitions");
  cost->add_option("--alpha", cfg.alpha, "cross-PE bandwidth");
  cost->add_option("--beta", cfg.beta, "storage bandwidth");
  cost->add_option("--gamma", cfg.gamma, "PE memory bandwidth");
  cost->add_option("--rho", cfg.rho, "cache miss rate");
  cost->add_option("--dim", cfg.feature_dim, "embedding dim");
  cost->add_option("--model-cost", cfg.model_cost, "relative model work M");
  cost->add_option("--csv", cfg.csv_path, "output CSV");

  CLI::App* partition = app.add_subcommand("partition", "partition a graph and report cut");
  add_graph_source(partition);
  add_seed(partition);
  partition->add_option("--parts", cfg.parts, "number of parts");
  partition->add_option("--partitioner", cfg.partitioner, "random|locality");
  partition->add_option("--csv", cfg.csv_path, "vertex,part CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    throw;
  }

  if (generate->parsed()) cfg.cmd = Subcommand::kGenerate;
  else if (curve->parsed()) cfg.cmd = Subcommand::kCurve;
  else if (run->parsed()) cfg.cmd = Subcommand::kRun;
  else if (cache->parsed()) cfg.cmd = Subcommand::kCache;
  else if (verify->parsed()) cfg.cmd = Subcommand::kVerify;
  else if (cost->parsed()) cfg.cmd = Subcommand::kCost;
  else cfg.cmd = Subcommand::kPartition;

  if (cfg.cmd != Subcommand::kGenerate) cfg.generate.reset();
  if (!generate_arg.empty()) {
    if (!cfg.graph_path.empty())
      throw CLI::ValidationError("--generate", "conflicts with --graph");
    cfg.generate = parse_generate_spec(generate_arg);
  }
  if (cfg.cmd != Subcommand::kGenerate && !cfg.generate && cfg.graph_path.empty())
    throw CLI::ValidationError("graph source",
                               "one of --graph or --generate is required");
  if (nv_override > 0) cfg.num_vertices_override = nv_override;

  cfg.kappa = parse_kappa(kappa_arg);
  cfg.sampler.kind = parse_sampler(sampler_arg);
  if (cfg.layers < 1) throw CLI::ValidationError("--layers", "must be >= 1");
  if (cfg.parts < 1) throw CLI::ValidationError("--parts", "must be >= 1");
  if (cfg.run_mode != "coop" && cfg.run_mode != "indep")
    throw CLI::ValidationError("--mode", "must be coop|indep");
  if (cfg.batch_mode != "independent" && cfg.batch_mode != "nested" &&
      cfg.batch_mode != "smoothed")
    throw CLI::ValidationError("--mode", "must be independent|nested|smoothed");
  if (cfg.seed_mode != "node" && cfg.seed_mode != "edge")
    throw CLI::ValidationError("--seed-mode", "must be node|edge");
  if (cfg.partitioner != "random" && cfg.partitioner != "locality")
    throw CLI::ValidationError("--partitioner", "must be random|locality");
  return cfg;
}

int execute(const RunConfig& cfg) {
  switch (cfg.cmd) {
    case Subcommand::kGenerate: return run_generate(cfg);
    case Subcommand::kCurve: return run_curve(cfg);
    case Subcommand::kRun: return run_run(cfg);
    case Subcommand::kCache: return run_cache(cfg);
    case Subcommand::kVerify: return run_verify(cfg);
    case Subcommand::kCost: return run_cost(cfg);
    case Subcommand::kPartition: return run_partition(cfg);
  }
  return kExitUsage;
}

int cli_main(int argc, const char* const* argv) {
  try {
    const RunConfig cfg = parse_and_validate(argc, argv);
    return execute(cfg);
  } catch (const CLI::CallForHelp&) {
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace coopbatch
