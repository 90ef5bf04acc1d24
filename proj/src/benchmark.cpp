#include "gapsafe/benchmark.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#include <json.hpp>

#include "gapsafe/elastic_net.hpp"
#include "gapsafe/errors.hpp"

namespace gapsafe {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

PathResult run_one(const Dataset& data, const Vector& grid, const RunConfig& cfg, Rule rule,
                   double eps) {
  SolverConfig sc;
  sc.rule = rule;
  sc.epsilon = eps;
  sc.screen_every = cfg.screen_every;
  sc.max_passes = cfg.max_passes;
  if (cfg.l1_ratio == 1.0) return run_path(data.X, data.y, grid, sc);
  return run_elastic_net_path(data.X, data.y, cfg.l1_ratio, grid, sc);
}

json config_echo(const RunConfig& c) {
  json rules = json::array();
  for (Rule r : c.rules) rules.push_back(std::string(to_string(r)));
  return json{{"data_path", c.data_path},
              {"format", std::string(to_string(c.format))},
              {"synth",
               {{"n", c.synth.n},
                {"p", c.synth.p},
                {"density", c.synth.density},
                {"snr", finite_or_null(c.synth.snr)}}},
              {"rules", rules},
              {"grid_T", c.grid_T},
              {"grid_delta", c.grid_delta},
              {"epsilons", c.epsilons},
              {"screen_every", c.screen_every},
              {"max_passes", c.max_passes},
              {"l1_ratio", c.l1_ratio},
              {"normalize", c.normalize},
              {"out_dir", c.out_dir},
              {"seed", c.seed},
              {"parallel_rules", c.parallel_rules}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace

void RunConfig::validate() const {
  if (rules.empty()) throw ParameterError("at least one rule is required");
  if (epsilons.empty()) throw ParameterError("at least one epsilon is required");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw ParameterError("epsilons must be positive");
  }
  if (grid_T < 2) throw ParameterError("grid_T must be at least 2");
  if (!(grid_delta > 0.0)) throw ParameterError("grid_delta must be positive");
  if (screen_every < 1) throw ParameterError("screen_every must be at least 1");
  if (max_passes < 1) throw ParameterError("max_passes must be at least 1");
  if (!(l1_ratio > 0.0) || l1_ratio > 1.0) throw ParameterError("l1_ratio must lie in (0, 1]");
  if (out_dir.empty()) throw ParameterError("output directory is required");
}

BenchmarkReport run_benchmark(const RunConfig& config) {
  config.validate();
  Dataset data = config.data_path.empty()
                     ? synth_dataset(config.synth.n, config.synth.p, config.synth.density,
                                     config.synth.snr, config.seed)
                     : load_dataset(config.data_path, config.format);
  return run_benchmark(config, data);
}

BenchmarkReport run_benchmark(const RunConfig& config, const Dataset& input) {
  config.validate();
  const Dataset data = config.normalize ? normalize_columns(input) : input;
  const double lmax = elastic_net_lambda_max(data.X, data.y, config.l1_ratio);
  if (!(lmax > 0.0)) throw ParameterError("lambda_max is zero: y is orthogonal to every column");
  const Vector grid = lambda_grid(lmax, config.grid_T, config.grid_delta);

  BenchmarkReport rep;
  rep.n = data.X.rows();
  rep.p = data.X.cols();
  rep.lambda_max = lmax;
  for (double eps : config.epsilons) {
    std::vector<PathResult> paths(config.rules.size());
    if (config.parallel_rules && config.rules.size() > 1) {
      std::vector<std::exception_ptr> errors(config.rules.size());
      std::vector<std::thread> workers;
      for (std::size_t k = 0; k < config.rules.size(); ++k) {
        workers.emplace_back([&, k] {
          try {
            paths[k] = run_one(data, grid, config, config.rules[k], eps);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    } else {
      for (std::size_t k = 0; k < config.rules.size(); ++k) {
        paths[k] = run_one(data, grid, config, config.rules[k], eps);
      }
    }
    for (std::size_t k = 0; k < config.rules.size(); ++k) {
      RunSummary s;
      s.rule = config.rules[k];
      s.epsilon = eps;
      const PathResult& pr = paths[k];
      s.n_lambdas = pr.lambdas.size();
      for (std::size_t t = 0; t < pr.lambdas.size(); ++t) {
        s.total_ms += pr.timings_ms[t];
        s.converged += pr.converged[t] ? 1 : 0;
        s.passes += pr.passes[t];
      }
      rep.runs.push_back(s);
      rep.paths.push_back(std::move(paths[k]));
    }
  }

  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  rep.trace_path = (dir / "trace.csv").string();
  {
    std::ofstream out(rep.trace_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + rep.trace_path + "'");
    out << "rule,epsilon,t,lambda,checkpoint_pass,n_active,p,gap,radius,elapsed_ms\n";
    for (std::size_t r = 0; r < rep.runs.size(); ++r) {
      const std::string rule(to_string(rep.runs[r].rule));
      const std::string eps = fmt(rep.runs[r].epsilon);
      const PathResult& pr = rep.paths[r];
      for (std::size_t t = 0; t < pr.lambdas.size(); ++t) {
        const std::string lam = fmt(pr.lambdas[t]);
        for (const CheckpointRecord& c : pr.traces[t]) {
          out << rule << ',' << eps << ',' << t << ',' << lam << ',' << c.pass << ','
              << c.n_active << ',' << rep.p << ',' << fmt(c.gap) << ',' << fmt(c.radius) << ','
              << fmt(c.elapsed_ms) << '\n';
        }
      }
    }
  }

  json runs = json::array();
  for (const RunSummary& s : rep.runs) {
    runs.push_back(json{{"rule", std::string(to_string(s.rule))},
                        {"epsilon", s.epsilon},
                        {"total_ms", s.total_ms},
                        {"n_lambdas", s.n_lambdas},
                        {"converged", s.converged},
                        {"passes", s.passes}});
  }
  rep.summary_path = (dir / "summary.json").string();
  write_json(rep.summary_path, json{{"version", kVersion}, {"runs", runs}});

  json meta{{"tool", "gapsafe"},
            {"seed", config.seed},
            {"versions",
             {{"gapsafe", kVersion},
              {"compiler", __VERSION__},
              {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
            {"config", config_echo(config)},
            {"dataset",
             {{"source", config.data_path.empty() ? "synthetic" : config.data_path},
              {"n", rep.n},
              {"p", rep.p},
              {"nnz", data.X.nnz()},
              {"sparse", data.X.is_sparse()},
              {"normalized", config.normalize},
              {"lambda_max", lmax}}},
            {"grid", grid},
            {"parallel_rules", config.parallel_rules},
            {"timing_note", config.parallel_rules
                                ? "rules ran concurrently; wall-clock timings interleave and "
                                  "are not comparable across rules"
                                : "rules ran sequentially; timings cover screening and solving "
                                  "per lambda"}};
  rep.metadata_path = (dir / "metadata.json").string();
  write_json(rep.metadata_path, meta);
  return rep;
}

}  // namespace gapsafe
