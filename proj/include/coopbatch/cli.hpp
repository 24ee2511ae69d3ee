#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coopbatch/samplers.hpp"

namespace coopbatch {

// Exit codes: 0 success, 1 assertion/verification failure, 2 usage or IO.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

enum class Subcommand { kGenerate, kCurve, kRun, kCache, kVerify, kCost, kPartition };

struct GenerateSpec {
  std::uint64_t n = 100000;
  double deg = 10.0;
  double skew = 0.6;
};

/// Fully resolved invocation; every run embeds this into its CSV header.
struct RunConfig {
  Subcommand cmd = Subcommand::kRun;

  // graph source: exactly one of graph_path / generate
  std::string graph_path;
  std::optional<GenerateSpec> generate;
  std::optional<std::uint64_t> num_vertices_override;

  SamplerConfig sampler;
  int layers = 3;
  std::uint64_t seed = 0;

  std::uint32_t parts = 1;
  std::string partitioner = "random";  // random | locality

  std::uint64_t kappa = 1;  // kKappaInfinity for "inf"
  std::string batch_mode = "independent";  // independent | nested | smoothed
  std::string run_mode = "coop";           // coop | indep
  std::string seed_mode = "node";          // node | edge

  std::uint64_t batch = 1024;
  std::uint64_t steps = 10;
  std::uint32_t trials = 50;
  std::vector<std::uint64_t> batch_sizes;
  std::uint64_t cache_capacity = 10000;

  std::uint32_t feature_dim = 32;
  std::uint32_t hidden_dim = 32;
  std::uint32_t num_classes = 8;
  std::uint32_t bytes_per_scalar = 4;

  // cost model
  double alpha = 600e9, beta = 64e9, gamma = 2e12;
  double rho = 1.0, model_cost = 1.0;

  // verify
  std::uint32_t verify_n = 3;
  int verify_l = 2;
  std::uint32_t random_fixtures = 0;

  std::string out_path;  // graph output (generate)
  std::string csv_path;  // experiment output

  std::vector<std::pair<std::string, std::string>> resolved() const;
};

/// Parse argv. Throws InputError (usage) on unknown flags, conflicts, or
/// out-of-domain values.
RunConfig parse_and_validate(int argc, const char* const* argv);

/// Run the subcommand; returns a process exit code. CSV outputs are written
/// atomically (temp file + rename) with the resolved config as '#' comments.
int execute(const RunConfig& cfg);

/// Convenience: parse + execute with usage errors mapped to kExitUsage.
int cli_main(int argc, const char* const* argv);

}  // namespace coopbatch
