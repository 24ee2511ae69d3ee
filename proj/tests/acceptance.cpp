// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier statistical checks run on a shared synthetic benchmark
// graph; every tolerance is pinned here in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coopbatch/analysis.hpp"
#include "coopbatch/cache.hpp"
#include "coopbatch/coop.hpp"
#include "coopbatch/parallel.hpp"
#include "coopbatch/partition.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace coopbatch;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.empty() ? "" : " — ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string kappa_label(std::uint64_t kappa) {
  return kappa == kKappaInfinity ? "inf" : std::to_string(kappa);
}

// ---- shared benchmark ------------------------------------------------------

constexpr std::uint64_t kBenchVertices = 100000;
constexpr double kBenchDegree = 16.0;
constexpr double kBenchSkew = 0.6;
constexpr std::uint64_t kBenchSeed = 42;

const Graph& benchmark_graph() {
  static const Graph g =
      generate_powerlaw(kBenchVertices, kBenchDegree, kBenchSkew, kBenchSeed);
  return g;
}

std::vector<std::vector<VertexId>> split_by_owner(const std::vector<VertexId>& batch,
                                                  const PartitionMap& pm) {
  std::vector<std::vector<VertexId>> out(pm.num_parts);
  for (const VertexId v : batch) out[pm.owner[v]].push_back(v);
  return out;
}

std::vector<VertexId> draw_batch(const Graph& g, std::uint64_t count,
                                 std::uint64_t seed) {
  std::vector<VertexId> out;
  std::set<VertexId> seen;
  std::uint64_t attempt = 0;
  while (out.size() < count) {
    const double u = hash_uniform(seed, {31337, attempt++});
    auto v = static_cast<VertexId>(u * static_cast<double>(g.num_vertices));
    if (v >= g.num_vertices) v = static_cast<VertexId>(g.num_vertices - 1);
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

SeedSchedule plain_schedule(std::uint64_t seed) {
  SeedSchedule s;
  s.kappa = 1;
  s.z1 = s.z2 = seed;
  return s;
}

struct MeanSe {
  double mean = 0.0, se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  for (const double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (const double x : xs) ss += (x - r.mean) * (x - r.mean);
  if (xs.size() > 1)
    r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                     static_cast<double>(xs.size()));
  return r;
}

// ---- criteria --------------------------------------------------------------

void criterion_1_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t violations = 0, trials = 0;
  for (std::uint32_t i = 0; i < 100; ++i) {
    const std::uint64_t n = 8 + hash_bits(kBenchSeed, {i, 1}) % 25;  // 8..32
    const double deg = 1.5 + 0.1 * static_cast<double>(hash_bits(kBenchSeed, {i, 2}) % 20);
    const Graph g = generate_powerlaw(n, deg, 0.4, hash_bits(kBenchSeed, {i, 3}));
    for (const std::uint32_t batch_n : {2u, 3u, 4u}) {
      if (batch_n > g.num_vertices) continue;
      const auto rep =
          verify_identities(g, batch_n, 2, 25, hash_bits(kBenchSeed, {i, batch_n}));
      violations += rep.violations;
      trials += rep.trials;
    }
  }
  const double elapsed = seconds_since(t0);
  report(1, "leave-one-out identities exact on 100 random graphs",
         violations == 0 && elapsed <= 60.0,
         std::to_string(trials) + " batches, " + std::to_string(violations) +
             " violations, " + fmt(elapsed) + "s");
}

struct CurveSet {
  std::map<std::string, WorkCurve> by_sampler;
  double elapsed = 0.0;
};

CurveSet compute_curves() {
  const auto t0 = std::chrono::steady_clock::now();
  const Graph& g = benchmark_graph();
  std::vector<std::uint64_t> sizes;
  for (std::uint64_t b = 64; b <= 8192; b *= 2) sizes.push_back(b);

  CurveSet out;
  for (const auto& [name, kind] :
       std::vector<std::pair<std::string, SamplerKind>>{
           {"ns", SamplerKind::kNs},
           {"labor0", SamplerKind::kLabor0},
           {"rw", SamplerKind::kRw}}) {
    SamplerConfig cfg;
    cfg.kind = kind;  // defaults: k=10, o=3, p=0.5, a=100
    out.by_sampler[name] = work_curve(g, cfg, sizes, 50, 3, kBenchSeed + 7);
  }
  out.elapsed = seconds_since(t0);
  return out;
}

void criterion_2_monotonicity(const CurveSet& curves) {
  bool pass = curves.elapsed <= 600.0;
  std::string detail;
  for (const auto& [name, curve] : curves.by_sampler) {
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
      const auto& a = curve.points[i];
      const auto& b = curve.points[i + 1];
      const double slack =
          std::sqrt(a.se_work * a.se_work + b.se_work * b.se_work);
      if (b.work_per_seed > a.work_per_seed + slack) {
        pass = false;
        detail += name + " rises at " + std::to_string(b.batch_size) + "; ";
      }
    }
    detail += name + " " + fmt(curve.points.front().work_per_seed) + "->" +
              fmt(curve.points.back().work_per_seed) + " ";
  }
  report(2, "work per seed nonincreasing in batch size (NS, LABOR-0, RW)", pass,
         detail + "(" + fmt(curves.elapsed) + "s)");
}

void criterion_3_concavity(const CurveSet& curves) {
  bool pass = true;
  std::string detail;
  for (const auto& [name, curve] : curves.by_sampler) {
    const auto rep = concavity_check(curve);
    if (!rep.pass) {
      pass = false;
      detail += name + " convex bend; ";
    }
  }
  report(3, "E[|S^3|] concave in batch size (2nd differences <= +2 s.e.)", pass,
         detail.empty() ? "all second differences within bounds" : detail);
}

void criterion_4_coop_exactness() {
  const Graph g = generate_powerlaw(2000, 12, 0.6, 5);
  const std::vector<VertexId> batch = draw_batch(g, 128, 17);
  bool union_ok = true;
  bool grads_ok = true;
  std::string detail;

  for (const std::uint32_t parts : {2u, 4u, 8u}) {
    const PartitionMap pm = partition_random(g.num_vertices, parts, 3 * parts);
    const auto per_pe = split_by_owner(batch, pm);

    for (const SamplerKind kind : {SamplerKind::kFull, SamplerKind::kNs,
                                   SamplerKind::kLabor0, SamplerKind::kRw}) {
      SamplerConfig cfg;
      cfg.kind = kind;
      cfg.rw_walks = 20;
      const auto sched = plain_schedule(900 + parts);
      const auto coop = coop_sample(g, pm, per_pe, 3, cfg, sched);
      std::vector<VertexId> merged;
      for (const auto& s : coop.owner_sets)
        merged.insert(merged.end(), s.begin(), s.end());
      std::sort(merged.begin(), merged.end());
      const auto single = expand(g, batch, 3, cfg, sched);
      if (merged != single.blocks[2].src_vertices) union_ok = false;
    }

    const FeatureStore store = FeatureStore::synth(g.num_vertices, 8, 4, 2);
    const GcnModel model = GcnModel::init(8, 8, 4, 3, 4);
    for (const SamplerKind kind : {SamplerKind::kFull, SamplerKind::kLabor0}) {
      SamplerConfig cfg;
      cfg.kind = kind;
      const auto sched = plain_schedule(700 + parts);
      const auto coop =
          coop_train_step(g, pm, per_pe, 3, cfg, sched, model, store);
      const auto single =
          indep_train_step(g, {batch}, 3, cfg, sched, model, store);
      const double loss_err = std::abs(coop.loss - single.loss) /
                              std::max(std::abs(single.loss), 1e-12);
      double grad_err = 0.0;
      for (std::size_t l = 0; l < coop.grad_w.size(); ++l)
        for (std::size_t i = 0; i < coop.grad_w[l].data.size(); ++i) {
          const double a = coop.grad_w[l].data[i];
          const double b = single.grad_w[l].data[i];
          grad_err = std::max(
              grad_err, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-9}));
        }
      if (loss_err >= 1e-5 || grad_err >= 1e-5) grads_ok = false;
      if (parts == 8 && kind == SamplerKind::kLabor0)
        detail = "P=8 labor0 loss_err=" + fmt(loss_err) +
                 " grad_err=" + fmt(grad_err);
    }
  }
  report(4, "cooperative sampling and training match the union batch",
         union_ok && grads_ok,
         std::string(union_ok ? "unions exact; " : "union mismatch; ") + detail);
}

void criterion_5_work_reduction() {
  const Graph& g = benchmark_graph();
  const int trials = 50;
  const std::uint64_t global_batch = 4096;
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kLabor0;

  struct Stats {
    std::vector<double> coop_e2, coop_s3, indep_e2, indep_s3;
    std::vector<double> coop_work, indep_work;
  };
  std::map<std::uint32_t, Stats> by_parts;

  for (const std::uint32_t parts : {2u, 4u, 8u}) {
    const PartitionMap pm = partition_random(g.num_vertices, parts, 1000 + parts);
    Stats st;
    st.coop_e2.resize(trials);
    st.coop_s3.resize(trials);
    st.indep_e2.resize(trials);
    st.indep_s3.resize(trials);
    st.coop_work.resize(trials);
    st.indep_work.resize(trials);
    parallel_for(trials, [&](std::size_t t) {
      const auto batch = draw_batch(g, global_batch, 500 * parts + t);
      const auto sched = plain_schedule(hash_bits(kBenchSeed, {parts, t}));

      const auto coop =
          coop_sample(g, pm, split_by_owner(batch, pm), 3, cfg, sched);
      double e2 = 0.0, s3 = 0.0, work = 0.0;
      for (std::uint32_t p = 0; p < parts; ++p) {
        e2 += static_cast<double>(coop.stacks[p].blocks[2].num_edges());
        s3 += static_cast<double>(coop.owner_sets[p].size());
        for (int l = 0; l < 3; ++l)
          work += static_cast<double>(coop.stacks[p].blocks[l].num_edges());
      }
      st.coop_e2[t] = e2 / parts;
      st.coop_s3[t] = s3 / parts;
      st.coop_work[t] = work;

      // independent: the same global batch split into equal chunks
      std::vector<std::vector<VertexId>> chunks(parts);
      for (std::size_t i = 0; i < batch.size(); ++i)
        chunks[i % parts].push_back(batch[i]);
      const auto indep = indep_sample(g, chunks, 3, cfg, sched);
      e2 = s3 = work = 0.0;
      for (std::uint32_t p = 0; p < parts; ++p) {
        e2 += static_cast<double>(indep[p].blocks[2].num_edges());
        s3 += static_cast<double>(indep[p].input_vertices().size());
        for (int l = 0; l < 3; ++l)
          work += static_cast<double>(indep[p].blocks[l].num_edges());
      }
      st.indep_e2[t] = e2 / parts;
      st.indep_s3[t] = s3 / parts;
      st.indep_work[t] = work;
    });
    by_parts[parts] = std::move(st);
  }

  const auto& p4 = by_parts[4];
  const MeanSe ce2 = mean_se(p4.coop_e2), ie2 = mean_se(p4.indep_e2);
  const MeanSe cs3 = mean_se(p4.coop_s3), is3 = mean_se(p4.indep_s3);
  const bool e2_ok =
      ie2.mean - ce2.mean >= 2.0 * std::sqrt(ie2.se * ie2.se + ce2.se * ce2.se);
  const bool s3_ok =
      is3.mean - cs3.mean >= 2.0 * std::sqrt(is3.se * is3.se + cs3.se * cs3.se);

  auto ratio = [&](std::uint32_t parts) {
    const auto& st = by_parts.at(parts);
    return mean_se(st.coop_work).mean / mean_se(st.indep_work).mean;
  };
  const double r2 = ratio(2), r8 = ratio(8);
  const bool ratio_ok = r8 < r2;

  report(5, "cooperative work strictly below independent at fixed global batch",
         e2_ok && s3_ok && ratio_ok,
         "P=4 |E^2|: " + fmt(ce2.mean) + " vs " + fmt(ie2.mean) + ", |S^3|: " +
             fmt(cs3.mean) + " vs " + fmt(is3.mean) + ", work ratio P2 " +
             fmt(r2) + " -> P8 " + fmt(r8));
}

void criterion_6_partition_quality() {
  const Graph& g = benchmark_graph();
  bool random_ok = true;
  std::string detail;
  for (const std::uint32_t parts : {2u, 4u, 8u}) {
    const double c =
        cross_edge_ratio(g, partition_random(g.num_vertices, parts, parts));
    const double expected =
        static_cast<double>(parts - 1) / static_cast<double>(parts);
    if (std::abs(c - expected) > 0.01) random_ok = false;
    detail += "P" + std::to_string(parts) + " c=" + fmt(c) + " ";
  }

  // connected fixture: benchmark plus a ring, symmetrized
  std::vector<Edge> edges;
  for (VertexId s = 0; s < g.num_vertices; ++s) {
    for (const VertexId t : g.neighbors(s)) edges.push_back({t, s});
    edges.push_back({s, static_cast<VertexId>((s + 1) % g.num_vertices)});
  }
  const Graph connected = make_undirected(build_csr(edges, g.num_vertices));
  const double c_local =
      cross_edge_ratio(connected, partition_locality(connected, 4));
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    if (c_local <
        cross_edge_ratio(connected, partition_random(connected.num_vertices, 4, seed)))
      ++wins;

  report(6, "random partition cut matches (P-1)/P; locality cuts less",
         random_ok && wins >= 6,
         detail + "locality c=" + fmt(c_local) + " beats random " +
             std::to_string(wins) + "/10");
}

void criterion_7_dependent_locality() {
  const Graph& g = benchmark_graph();
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kLabor0;
  cfg.fanout = 10;
  const std::uint64_t capacity = kBenchVertices / 10;
  const std::uint64_t batch = 256;
  const std::uint64_t steps = 120;
  const int trials = 50;

  const std::vector<std::uint64_t> kappas{1, 4, 16, 64, 256, kKappaInfinity};
  std::vector<MeanSe> rates;
  for (const std::uint64_t kappa : kappas) {
    std::vector<double> xs(trials);
    parallel_for(trials, [&](std::size_t t) {
      MinibatchSchedule sched;
      sched.mode = BatchMode::kSmoothed;
      sched.kappa = kappa;
      sched.batch_size = batch;
      const auto r = run_dependent_experiment(g, sched, steps, capacity, cfg, 3,
                                              32, 4, 9000 + t);
      xs[t] = r.steady_miss_rate;
    });
    rates.push_back(mean_se(xs));
  }

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
    const double slack = std::sqrt(rates[i].se * rates[i].se +
                                   rates[i + 1].se * rates[i + 1].se);
    if (rates[i + 1].mean > rates[i].mean + slack) monotone = false;
  }
  const double reduction = rates.front().mean / rates.back().mean;

  // kappa = infinity: recurring batches resample identical stacks each epoch
  MinibatchSchedule inf_sched;
  inf_sched.mode = BatchMode::kSmoothed;
  inf_sched.kappa = kKappaInfinity;
  inf_sched.batch_size = kBenchVertices / 16;  // 16 steps per epoch
  const auto rep = run_dependent_experiment(g, inf_sched, 32, capacity, cfg, 3,
                                            32, 4, 4242);
  bool identical = rep.steps_per_epoch == 16;
  for (std::uint64_t i = 0; i + rep.steps_per_epoch < rep.rows.size(); ++i)
    if (rep.rows[i].fingerprint != rep.rows[i + rep.steps_per_epoch].fingerprint)
      identical = false;

  std::string detail = "miss rates";
  for (std::size_t i = 0; i < kappas.size(); ++i)
    detail += " " + kappa_label(kappas[i]) + ":" + fmt(rates[i].mean);
  detail += ", reduction " + fmt(reduction) + "x";
  report(7, "LRU miss rate nonincreasing in kappa; static stacks repeat exactly",
         monotone && reduction >= 1.5 && identical, detail);
}

void criterion_8_smoothed_variates() {
  bool ks_ok = true;
  for (const double c : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const std::size_t n = 100000;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = interp_variate(88, 99, c, {i});
    if (oracle::ks_statistic_uniform(xs) >= oracle::ks_critical_1pct(n))
      ks_ok = false;
  }

  bool endpoints_exact = true;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    if (interp_variate(88, 99, 0.0, {i}) != phi(std_normal(88, {i})))
      endpoints_exact = false;
    if (interp_variate(88, 99, 1.0, {i}) != phi(std_normal(99, {i})))
      endpoints_exact = false;
  }

  // neighborhood drift grows with iteration distance (LABOR-0 on a star)
  const Graph star = fixtures::star(1000);
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kLabor0;
  cfg.fanout = 100;
  SeedSchedule sched = SeedSchedule::make(64, 31);
  const std::vector<VertexId> seeds{0};
  std::vector<std::set<VertexId>> snaps;
  for (int i = 0; i <= 32; ++i) {
    const auto stack = expand(star, seeds, 1, cfg, sched);
    std::set<VertexId> s(stack.blocks[0].src_vertices.begin(),
                         stack.blocks[0].src_vertices.end());
    s.erase(0);
    snaps.push_back(std::move(s));
    sched = schedule_advance(sched);
  }
  auto changed = [&](int i, int j) {
    std::vector<VertexId> diff;
    std::set_symmetric_difference(snaps[i].begin(), snaps[i].end(),
                                  snaps[j].begin(), snaps[j].end(),
                                  std::back_inserter(diff));
    return static_cast<double>(diff.size());
  };
  const double d1 = changed(0, 1), d8 = changed(0, 8), d32 = changed(0, 32);
  const bool drift_ok = d1 <= d8 && d8 <= d32;

  report(8, "smoothed variates: uniform at every c, exact endpoints, monotone drift",
         ks_ok && endpoints_exact && drift_ok,
         "drift " + fmt(d1) + " <= " + fmt(d8) + " <= " + fmt(d32));
}

void criterion_9_sampler_conformance() {
  // NS reservoir frequencies on a 100-leaf star
  const Graph star = fixtures::star(100);
  const std::vector<VertexId> center{0};
  std::map<VertexId, double> counts;
  const int epochs = 10000;
  for (int e = 0; e < epochs; ++e) {
    const auto block = sample_ns(star, center, 10, 4000 + e);
    for (const auto& [si, di] : block.edges)
      counts[block.src_vertices[si]] += 1.0;
  }
  double chi2 = 0.0;
  const double expected = epochs * 10.0 / 100.0;
  for (VertexId v = 1; v <= 100; ++v)
    chi2 += (counts[v] - expected) * (counts[v] - expected) / expected;
  const bool ns_ok = chi2 < oracle::chi2_critical_1pct(99);

  // LABOR-0 inclusion matches the threshold predicate edge by edge
  const Graph g = generate_powerlaw(500, 8, 0.6, 3);
  bool labor_ok = true;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto variate = [t](VertexId v) {
      return hash_uniform(6000 + t, {kStreamLabor, v});
    };
    const auto batch = draw_batch(g, 32, t);
    const auto block = sample_labor0(g, batch, 10, variate);
    std::set<std::pair<VertexId, VertexId>> sampled;
    for (const auto& [si, di] : block.edges)
      sampled.insert({block.src_vertices[si], block.dst_vertices[di]});
    for (const VertexId s : batch) {
      const double d = static_cast<double>(g.degree(s));
      for (const VertexId nb : g.neighbors(s)) {
        const bool want = variate(nb) <= 10.0 / d;
        if (want != sampled.count({nb, s}) > 0) labor_ok = false;
      }
    }
  }

  // RW visit distribution against the transition-power oracle
  const Graph chain = fixtures::weighted_chain4();
  const std::vector<std::vector<double>> transition = {
      {0, 1, 0, 0},
      {1.0 / 3, 0, 2.0 / 3, 0},
      {0, 2.0 / 5, 0, 3.0 / 5},
      {0, 0, 1, 0},
  };
  const auto expected_freq = oracle::rw_visit_frequencies(transition, 1, 2);
  SamplerConfig rw;
  rw.kind = SamplerKind::kRw;
  rw.rw_length = 2;
  rw.rw_restart = 0.0;
  rw.rw_walks = 1;
  rw.fanout = 4;
  std::map<VertexId, double> freq;
  double total = 0.0;
  const std::vector<VertexId> seed1{1};
  for (int t = 0; t < 6000; ++t) {
    const auto block = sample_rw(chain, seed1, rw, 70000 + t);
    for (const auto& [si, di] : block.edges) {
      freq[block.src_vertices[si]] += 1.0;
      total += 1.0;
    }
  }
  bool rw_ok = true;
  double worst = 0.0;
  for (VertexId v = 0; v < 4; ++v) {
    if (v == 1) continue;
    const double f = freq[v] / total;
    worst = std::max(worst, std::abs(f - expected_freq[v]));
    if (std::abs(f - expected_freq[v]) > 0.03) rw_ok = false;
  }

  report(9, "sampler conformance (NS chi-square, LABOR-0 predicate, RW oracle)",
         ns_ok && labor_ok && rw_ok,
         "chi2=" + fmt(chi2) + " (crit " + fmt(oracle::chi2_critical_1pct(99)) +
             "), rw max dev " + fmt(worst));
}

void criterion_10_gradients() {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    BipartiteBlock block;
    block.dst_vertices = {0, 1};
    block.src_vertices = {0, 1, 2, 3};
    block.dst_pos_in_src = {0, 1};
    for (std::uint32_t si = 0; si < 4; ++si)
      for (std::uint32_t di = 0; di < 2; ++di)
        if (hash_uniform(trial, {si, di, 5}) < 0.7) block.edges.push_back({si, di});

    const std::uint32_t in_dim = 3, out_dim = 2;
    FeatureMatrix h;
    h.row_ids = {0, 1, 2, 3};
    h.dim = in_dim;
    h.values.resize(12);
    for (std::size_t i = 0; i < h.values.size(); ++i)
      h.values[i] = 2.0 * hash_uniform(trial, {11, i}) - 1.0;
    DenseMatrix w = DenseMatrix::zeros(in_dim, out_dim);
    for (std::size_t i = 0; i < w.data.size(); ++i)
      w.data[i] = 2.0 * hash_uniform(trial, {12, i}) - 1.0;
    FeatureMatrix grad_out;
    grad_out.row_ids = {0, 1};
    grad_out.dim = out_dim;
    grad_out.values.resize(4);
    for (std::size_t i = 0; i < grad_out.values.size(); ++i)
      grad_out.values[i] = 2.0 * hash_uniform(trial, {13, i}) - 1.0;

    const auto back = gcn_backward(block, h, w, grad_out, Activation::kTanh);
    const auto objective = [&](const FeatureMatrix& hh, const DenseMatrix& ww) {
      const auto out = gcn_forward(block, hh, ww, Activation::kTanh);
      double s = 0.0;
      for (std::size_t i = 0; i < out.values.size(); ++i)
        s += out.values[i] * grad_out.values[i];
      return s;
    };
    const double eps = 1e-3;
    for (std::size_t i = 0; i < h.values.size(); ++i) {
      FeatureMatrix hp = h, hm = h;
      hp.values[i] += eps;
      hm.values[i] -= eps;
      const double fd = (objective(hp, w) - objective(hm, w)) / (2 * eps);
      const double an = back.grad_h_in.values[i];
      worst = std::max(worst, std::abs(fd - an) /
                                  std::max({std::abs(fd), std::abs(an), 1e-6}));
    }
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      DenseMatrix wp = w, wm = w;
      wp.data[i] += eps;
      wm.data[i] -= eps;
      const double fd = (objective(h, wp) - objective(h, wm)) / (2 * eps);
      const double an = back.grad_w.data[i];
      worst = std::max(worst, std::abs(fd - an) /
                                  std::max({std::abs(fd), std::abs(an), 1e-6}));
    }
  }
  report(10, "backward pass matches central finite differences", worst <= 1e-4,
         "max relative error " + fmt(worst));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_identities();

  const CurveSet curves = compute_curves();
  criterion_2_monotonicity(curves);
  criterion_3_concavity(curves);

  criterion_4_coop_exactness();
  criterion_5_work_reduction();
  criterion_6_partition_quality();
  criterion_7_dependent_locality();
  criterion_8_smoothed_variates();
  criterion_9_sampler_conformance();
  criterion_10_gradients();

  std::printf("%d/10 criteria passed in %.1fs\n", 10 - g_failures,
              seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
