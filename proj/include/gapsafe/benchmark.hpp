#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gapsafe/cd_solver.hpp"
#include "gapsafe/dataset.hpp"
#include "gapsafe/path.hpp"

namespace gapsafe {

inline constexpr const char* kVersion = "0.1.0";

struct SynthSpec {
  Index n = 100;
  Index p = 1000;
  double density = 1.0;
  double snr = 10.0;
};

struct RunConfig {
  // Dataset file; when empty, data is generated from `synth` and `seed`.
  std::string data_path;
  DataFormat format = DataFormat::Svmlight;
  SynthSpec synth;
  std::vector<Rule> rules;
  std::size_t grid_T = 100;
  double grid_delta = 3.0;
  std::vector<double> epsilons{1e-4};
  std::size_t screen_every = 10;
  std::size_t max_passes = 10000;
  double l1_ratio = 1.0;  // Elastic-Net l1 fraction; 1 is the Lasso
  bool normalize = false;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool parallel_rules = false;

  void validate() const;
};

struct RunSummary {
  Rule rule = Rule::None;
  double epsilon = 0.0;
  double total_ms = 0.0;
  std::size_t n_lambdas = 0;
  std::size_t converged = 0;
  std::size_t passes = 0;
};

struct BenchmarkReport {
  std::vector<RunSummary> runs;  // rule-major within each epsilon, config order
  std::vector<PathResult> paths; // parallel to runs
  Index n = 0;
  Index p = 0;
  double lambda_max = 0.0;
  std::string trace_path;
  std::string summary_path;
  std::string metadata_path;
};

/// Runs the lambda path for every (epsilon, rule) pair and writes
/// trace.csv, summary.json and metadata.json into config.out_dir.
BenchmarkReport run_benchmark(const RunConfig& config);

// Same, on data already in memory (no file is read).
BenchmarkReport run_benchmark(const RunConfig& config, const Dataset& data);

}  // namespace gapsafe
