// Command-line front end: benchmark runs, synthetic data generation and
// single solves, all through the C interface.
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapsafe/gapsafe.h"

namespace {

struct DataArgs {
  std::string path;
  std::string format = "svmlight";
  size_t n = 100;
  size_t p = 1000;
  double density = 1.0;
  double snr = 10.0;
  uint64_t seed = 0;
  bool normalize = false;
};

int report(int status, const char* context) {
  if (status != GS_OK) {
    std::fprintf(stderr, "error: %s: %s (%s)\n", context, gs_last_error(),
                 gs_status_string(status));
  }
  return status;
}

void add_synth_flags(CLI::App* app, DataArgs& d) {
  app->add_option("--synth-n", d.n, "Samples of the synthetic design")->capture_default_str();
  app->add_option("--synth-p", d.p, "Features of the synthetic design")->capture_default_str();
  app->add_option("--synth-density", d.density, "Fraction of nonzero entries")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_option("--synth-snr", d.snr, "Signal-to-noise ratio (inf for none)")
      ->capture_default_str();
}

void add_data_flags(CLI::App* app, DataArgs& d) {
  app->add_option("--data", d.path, "Dataset file (synthetic data when omitted)");
  app->add_option("--format", d.format, "dense-csv or svmlight")->capture_default_str();
  app->add_option("--seed", d.seed, "Seed for synthetic data")->capture_default_str();
  app->add_flag("--normalize", d.normalize, "Scale columns to unit norm");
  add_synth_flags(app, d);
}

int open_data(const DataArgs& d, gs_dataset** out) {
  if (d.path.empty()) {
    return report(gs_dataset_synth(d.n, d.p, d.density, d.snr, d.seed, out), "synth");
  }
  gs_format fmt;
  if (int s = gs_format_from_name(d.format.c_str(), &fmt); s != GS_OK) {
    return report(s, "--format");
  }
  if (int s = gs_dataset_load(d.path.c_str(), fmt, out); s != GS_OK) {
    return report(s, d.path.c_str());
  }
  if (d.normalize) return report(gs_dataset_normalize(*out), "normalize");
  return GS_OK;
}

int run_bench(const DataArgs& d, const std::vector<std::string>& rule_names,
              const std::vector<double>& eps, size_t grid_T, double grid_delta,
              size_t screen_every, size_t max_passes, double l1_ratio, const std::string& out,
              bool parallel) {
  std::vector<gs_rule> rules;
  for (const auto& name : rule_names) {
    gs_rule r;
    if (int s = gs_rule_from_name(name.c_str(), &r); s != GS_OK) return report(s, "--rules");
    rules.push_back(r);
  }
  gs_format fmt = GS_FORMAT_SVMLIGHT;
  if (!d.path.empty()) {
    if (int s = gs_format_from_name(d.format.c_str(), &fmt); s != GS_OK) {
      return report(s, "--format");
    }
  }
  gs_bench_options o;
  gs_bench_options_init(&o);
  o.data_path = d.path.empty() ? nullptr : d.path.c_str();
  o.format = fmt;
  o.synth_n = d.n;
  o.synth_p = d.p;
  o.synth_density = d.density;
  o.synth_snr = d.snr;
  o.rules = rules.data();
  o.n_rules = rules.size();
  o.grid_T = grid_T;
  o.grid_delta = grid_delta;
  o.epsilons = eps.data();
  o.n_epsilons = eps.size();
  o.screen_every = screen_every;
  o.max_passes = max_passes;
  o.l1_ratio = l1_ratio;
  o.normalize = d.normalize ? 1 : 0;
  o.out_dir = out.c_str();
  o.seed = d.seed;
  o.parallel_rules = parallel ? 1 : 0;

  size_t n_runs = 0;
  std::vector<gs_bench_run> runs(rules.size() * eps.size());
  if (int s = gs_benchmark_run(&o, runs.data(), runs.size(), &n_runs); s != GS_OK) {
    return report(s, "bench");
  }
  std::printf("%-12s %10s %12s %10s %10s\n", "rule", "epsilon", "total_ms", "converged",
              "passes");
  for (size_t k = 0; k < n_runs && k < runs.size(); ++k) {
    const gs_bench_run& r = runs[k];
    std::printf("%-12s %10.1e %12.2f %6zu/%-3zu %10zu\n", gs_rule_name(r.rule), r.epsilon,
                r.total_ms, r.converged, r.n_lambdas, r.passes);
  }
  std::printf("reports written to %s\n", out.c_str());
  return GS_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe screening for the Lasso and Elastic Net"};
  app.set_version_flag("--version", std::string(gs_version()));
  app.require_subcommand(1);

  DataArgs bench_data;
  std::vector<std::string> rules{"none", "gap_sphere"};
  std::vector<double> eps{1e-4};
  size_t grid_T = 100;
  double grid_delta = 3.0;
  size_t screen_every = 10;
  size_t max_passes = 10000;
  double l1_ratio = 1.0;
  std::string out_dir = "out";
  bool parallel = false;

  CLI::App* bench = app.add_subcommand("bench", "Run the regularization path for several rules");
  add_data_flags(bench, bench_data);
  bench->add_option("--rules", rules, "none,static,dynamic,st3,gap_sphere,gap_dome")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--eps", eps, "Duality gap targets")->delimiter(',')->capture_default_str();
  bench->add_option("--grid-T", grid_T, "Number of lambda values")->capture_default_str();
  bench->add_option("--grid-delta", grid_delta, "Decades spanned by the grid")
      ->capture_default_str();
  bench->add_option("--screen-every", screen_every, "Passes between screenings")
      ->capture_default_str();
  bench->add_option("--max-passes", max_passes, "Pass budget per lambda")
      ->capture_default_str();
  bench->add_option("--l1-ratio", l1_ratio, "Elastic-Net l1 fraction (1 = Lasso)")
      ->capture_default_str();
  bench->add_option("--out", out_dir, "Output directory")->capture_default_str();
  bench->add_flag("--parallel-rules", parallel, "Run rules concurrently");

  DataArgs synth_data;
  std::string synth_out;
  std::string synth_format = "svmlight";
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->add_option("--seed", synth_data.seed, "Random seed")->capture_default_str();
  add_synth_flags(synth, synth_data);
  synth->add_option("--out", synth_out, "Output file")->required();
  synth->add_option("--format", synth_format, "dense-csv or svmlight")->capture_default_str();

  DataArgs solve_data;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double lambda_ratio = 0.1;
  std::string solve_rule = "gap_sphere";
  double solve_eps = 1e-6;
  double solve_l1 = 1.0;
  std::string coef_out;
  CLI::App* solve = app.add_subcommand("solve", "Solve at a single lambda");
  add_data_flags(solve, solve_data);
  solve->add_option("--lambda", lambda, "Regularization strength");
  solve->add_option("--lambda-ratio", lambda_ratio, "lambda / lambda_max, used without --lambda")
      ->capture_default_str();
  solve->add_option("--rule", solve_rule, "Screening rule")->capture_default_str();
  solve->add_option("--eps", solve_eps, "Duality gap target")->capture_default_str();
  solve->add_option("--max-passes", max_passes, "Pass budget")->capture_default_str();
  solve->add_option("--screen-every", screen_every, "Passes between screenings")
      ->capture_default_str();
  solve->add_option("--l1-ratio", solve_l1, "Elastic-Net l1 fraction")->capture_default_str();
  solve->add_option("--coef-out", coef_out, "Write coefficients, one per line");

  CLI11_PARSE(app, argc, argv);

  if (bench->parsed()) {
    return run_bench(bench_data, rules, eps, grid_T, grid_delta, screen_every, max_passes,
                     l1_ratio, out_dir, parallel) == GS_OK
               ? 0
               : 1;
  }

  if (synth->parsed()) {
    gs_format fmt;
    if (report(gs_format_from_name(synth_format.c_str(), &fmt), "--format") != GS_OK) return 1;
    gs_dataset* ds = nullptr;
    synth_data.path.clear();
    if (open_data(synth_data, &ds) != GS_OK) return 1;
    const int s = report(gs_dataset_save(ds, synth_out.c_str(), fmt), synth_out.c_str());
    gs_dataset_free(ds);
    return s == GS_OK ? 0 : 1;
  }

  gs_dataset* ds = nullptr;
  if (open_data(solve_data, &ds) != GS_OK) return 1;
  size_t n = 0, p = 0;
  gs_dataset_shape(ds, &n, &p);
  double lmax = 0.0;
  if (report(gs_dataset_lambda_max(ds, &lmax), "lambda_max") != GS_OK) {
    gs_dataset_free(ds);
    return 1;
  }
  if (std::isnan(lambda)) lambda = lambda_ratio * lmax / solve_l1;
  gs_solver_options o;
  gs_solver_options_init(&o);
  o.epsilon = solve_eps;
  o.max_passes = max_passes;
  o.screen_every = screen_every;
  o.l1_ratio = solve_l1;
  if (report(gs_rule_from_name(solve_rule.c_str(), &o.rule), "--rule") != GS_OK) {
    gs_dataset_free(ds);
    return 1;
  }
  std::vector<double> beta(p);
  gs_solve_info info{};
  const int s = report(gs_solve(ds, lambda, &o, beta.data(), &info), "solve");
  gs_dataset_free(ds);
  if (s != GS_OK) return 1;
  size_t nnz = 0;
  for (double b : beta) nnz += b != 0.0;
  std::printf("n=%zu p=%zu lambda=%.6g lambda_max=%.6g\n", n, p, lambda, lmax);
  std::printf("converged=%d passes=%zu gap=%.3e primal=%.10g active=%zu nonzeros=%zu "
              "time_ms=%.2f\n",
              info.converged, info.passes, info.gap, info.primal, info.n_active, nnz,
              info.elapsed_ms);
  if (!coef_out.empty()) {
    std::FILE* f = std::fopen(coef_out.c_str(), "w");
    if (!f) {
      std::fprintf(stderr, "error: cannot write %s\n", coef_out.c_str());
      return 1;
    }
    for (double b : beta) std::fprintf(f, "%.17g\n", b);
    std::fclose(f);
  }
  return info.converged ? 0 : 2;
}
