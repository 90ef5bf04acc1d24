#include "gapsafe/gapsafe.h"

#include <chrono>
#include <filesystem>
#include <new>
#include <string>

#include "gapsafe/benchmark.hpp"
#include "gapsafe/elastic_net.hpp"
#include "gapsafe/errors.hpp"

struct gs_dataset {
  gapsafe::Dataset data;
};

struct gs_path {
  gapsafe::PathResult result;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what;
  return code;
}

template <class F>
int guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return GS_OK;
  } catch (const gapsafe::ParseError& e) {
    return fail(GS_ERR_PARSE, e.what());
  } catch (const gapsafe::IoError& e) {
    return fail(GS_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(GS_ERR_IO, e.what());
  } catch (const gapsafe::NumericalError& e) {
    return fail(GS_ERR_NUMERICAL, e.what());
  } catch (const gapsafe::OracleFailure& e) {
    return fail(GS_ERR_NUMERICAL, e.what());
  } catch (const gapsafe::ContractViolation& e) {
    return fail(GS_ERR_CONTRACT, e.what());
  } catch (const gapsafe::IndexError& e) {
    return fail(GS_ERR_INDEX, e.what());
  } catch (const gapsafe::ParameterError& e) {
    return fail(GS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GS_ERR_INTERNAL, "unknown error");
  }
}

gapsafe::Rule to_rule(gs_rule r) {
  switch (r) {
    case GS_RULE_NONE: return gapsafe::Rule::None;
    case GS_RULE_STATIC: return gapsafe::Rule::Static;
    case GS_RULE_DYNAMIC: return gapsafe::Rule::Dynamic;
    case GS_RULE_ST3: return gapsafe::Rule::ST3;
    case GS_RULE_GAP_SPHERE: return gapsafe::Rule::GapSphere;
    case GS_RULE_GAP_DOME: return gapsafe::Rule::GapDome;
  }
  throw gapsafe::ParameterError("unknown rule " + std::to_string(static_cast<int>(r)));
}

gs_rule from_rule(gapsafe::Rule r) {
  switch (r) {
    case gapsafe::Rule::None: return GS_RULE_NONE;
    case gapsafe::Rule::Static: return GS_RULE_STATIC;
    case gapsafe::Rule::Dynamic: return GS_RULE_DYNAMIC;
    case gapsafe::Rule::ST3: return GS_RULE_ST3;
    case gapsafe::Rule::GapSphere: return GS_RULE_GAP_SPHERE;
    case gapsafe::Rule::GapDome: return GS_RULE_GAP_DOME;
  }
  return GS_RULE_NONE;
}

gapsafe::DataFormat to_format(gs_format f) {
  switch (f) {
    case GS_FORMAT_DENSE_CSV: return gapsafe::DataFormat::DenseCsv;
    case GS_FORMAT_SVMLIGHT: return gapsafe::DataFormat::Svmlight;
  }
  throw gapsafe::ParameterError("unknown format " + std::to_string(static_cast<int>(f)));
}

gapsafe::SolverConfig to_config(const gs_solver_options& o) {
  gapsafe::SolverConfig c;
  c.epsilon = o.epsilon;
  c.max_passes = o.max_passes;
  c.screen_every = o.screen_every;
  c.rule = to_rule(o.rule);
  return c;
}

#define GS_REQUIRE(ptr)                                               \
  do {                                                                \
    if ((ptr) == nullptr) return fail(GS_ERR_NULL_POINTER, #ptr " is null"); \
  } while (0)

}  // namespace

extern "C" {

const char* gs_version(void) { return gapsafe::kVersion; }

const char* gs_last_error(void) { return g_last_error.c_str(); }

const char* gs_status_string(int status) {
  switch (status) {
    case GS_OK: return "ok";
    case GS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GS_ERR_INDEX: return "index out of range";
    case GS_ERR_PARSE: return "parse error";
    case GS_ERR_IO: return "i/o error";
    case GS_ERR_NUMERICAL: return "numerical error";
    case GS_ERR_CONTRACT: return "contract violation";
    case GS_ERR_NULL_POINTER: return "null pointer";
    case GS_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    default: return "internal error";
  }
}

int gs_rule_from_name(const char* name, gs_rule* out) {
  GS_REQUIRE(name);
  GS_REQUIRE(out);
  const auto r = gapsafe::parse_rule(name);
  if (!r) return fail(GS_ERR_INVALID_ARGUMENT, ("unknown rule '" + std::string(name) + "'").c_str());
  *out = from_rule(*r);
  return GS_OK;
}

const char* gs_rule_name(gs_rule rule) {
  switch (rule) {
    case GS_RULE_NONE: return "none";
    case GS_RULE_STATIC: return "static";
    case GS_RULE_DYNAMIC: return "dynamic";
    case GS_RULE_ST3: return "st3";
    case GS_RULE_GAP_SPHERE: return "gap_sphere";
    case GS_RULE_GAP_DOME: return "gap_dome";
  }
  return "unknown";
}

int gs_format_from_name(const char* name, gs_format* out) {
  GS_REQUIRE(name);
  GS_REQUIRE(out);
  const auto f = gapsafe::parse_format(name);
  if (!f) {
    return fail(GS_ERR_INVALID_ARGUMENT, ("unknown format '" + std::string(name) + "'").c_str());
  }
  *out = *f == gapsafe::DataFormat::DenseCsv ? GS_FORMAT_DENSE_CSV : GS_FORMAT_SVMLIGHT;
  return GS_OK;
}

int gs_dataset_load(const char* path, gs_format format, gs_dataset** out) {
  GS_REQUIRE(path);
  GS_REQUIRE(out);
  return guarded([&] {
    *out = new gs_dataset{gapsafe::load_dataset(path, to_format(format))};
  });
}

int gs_dataset_synth(size_t n, size_t p, double density, double snr, uint64_t seed,
                     gs_dataset** out) {
  GS_REQUIRE(out);
  return guarded([&] { *out = new gs_dataset{gapsafe::synth_dataset(n, p, density, snr, seed)}; });
}

int gs_dataset_from_dense(size_t n, size_t p, const double* col_major, const double* y,
                          gs_dataset** out) {
  GS_REQUIRE(col_major);
  GS_REQUIRE(y);
  GS_REQUIRE(out);
  return guarded([&] {
    gapsafe::Vector values(col_major, col_major + n * p);
    gapsafe::Vector target(y, y + n);
    *out = new gs_dataset{gapsafe::Dataset{gapsafe::DesignMatrix::dense(n, p, std::move(values)),
                                           std::move(target), std::nullopt}};
  });
}

int gs_dataset_save(const gs_dataset* data, const char* path, gs_format format) {
  GS_REQUIRE(data);
  GS_REQUIRE(path);
  return guarded([&] { gapsafe::save_dataset(data->data, path, to_format(format)); });
}

int gs_dataset_normalize(gs_dataset* data) {
  GS_REQUIRE(data);
  return guarded([&] { data->data = gapsafe::normalize_columns(data->data); });
}

int gs_dataset_shape(const gs_dataset* data, size_t* n, size_t* p) {
  GS_REQUIRE(data);
  if (n) *n = data->data.X.rows();
  if (p) *p = data->data.X.cols();
  return GS_OK;
}

int gs_dataset_lambda_max(const gs_dataset* data, double* out) {
  GS_REQUIRE(data);
  GS_REQUIRE(out);
  return guarded([&] { *out = data->data.X.max_abs_correlation(data->data.y).value; });
}

void gs_dataset_free(gs_dataset* data) { delete data; }

void gs_solver_options_init(gs_solver_options* opts) {
  if (!opts) return;
  const gapsafe::SolverConfig d;
  opts->epsilon = d.epsilon;
  opts->max_passes = d.max_passes;
  opts->screen_every = d.screen_every;
  opts->rule = from_rule(d.rule);
  opts->l1_ratio = 1.0;
}

int gs_solve(const gs_dataset* data, double lambda, const gs_solver_options* opts,
             double* beta_out, gs_solve_info* info) {
  GS_REQUIRE(data);
  GS_REQUIRE(opts);
  GS_REQUIRE(beta_out);
  return guarded([&] {
    const gapsafe::SolverConfig cfg = to_config(*opts);
    const gapsafe::ElasticNetProblem en{data->data.X, data->data.y, lambda, opts->l1_ratio};
    const auto start = std::chrono::steady_clock::now();
    const gapsafe::SolveResult r = gapsafe::solve(gapsafe::to_lasso(en), cfg);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    std::copy(r.beta.begin(), r.beta.end(), beta_out);
    if (info) {
      *info = gs_solve_info{r.cert.primal,         r.cert.dual,        r.cert.gap,
                            r.state.passes_done,   r.state.active.size(), r.converged ? 1 : 0,
                            ms};
    }
  });
}

int gs_path_run(const gs_dataset* data, size_t grid_T, double grid_delta,
                const gs_solver_options* opts, gs_path** out) {
  GS_REQUIRE(data);
  GS_REQUIRE(opts);
  GS_REQUIRE(out);
  return guarded([&] {
    const gapsafe::SolverConfig cfg = to_config(*opts);
    const double lmax =
        gapsafe::elastic_net_lambda_max(data->data.X, data->data.y, opts->l1_ratio);
    const gapsafe::Vector grid = gapsafe::lambda_grid(lmax, grid_T, grid_delta);
    *out = new gs_path{opts->l1_ratio == 1.0
                           ? gapsafe::run_path(data->data.X, data->data.y, grid, cfg)
                           : gapsafe::run_elastic_net_path(data->data.X, data->data.y,
                                                           opts->l1_ratio, grid, cfg)};
  });
}

size_t gs_path_length(const gs_path* path) { return path ? path->result.lambdas.size() : 0; }

int gs_path_lambda(const gs_path* path, size_t t, double* out) {
  GS_REQUIRE(path);
  GS_REQUIRE(out);
  if (t >= path->result.lambdas.size()) return fail(GS_ERR_INDEX, "grid index out of range");
  *out = path->result.lambdas[t];
  return GS_OK;
}

int gs_path_beta(const gs_path* path, size_t t, double* beta_out, size_t len) {
  GS_REQUIRE(path);
  GS_REQUIRE(beta_out);
  if (t >= path->result.lambdas.size()) return fail(GS_ERR_INDEX, "grid index out of range");
  const gapsafe::Vector& b = path->result.betas[t];
  if (len < b.size()) return fail(GS_ERR_BUFFER_TOO_SMALL, "coefficient buffer too small");
  std::copy(b.begin(), b.end(), beta_out);
  return GS_OK;
}

int gs_path_info(const gs_path* path, size_t t, gs_solve_info* info) {
  GS_REQUIRE(path);
  GS_REQUIRE(info);
  const gapsafe::PathResult& r = path->result;
  if (t >= r.lambdas.size()) return fail(GS_ERR_INDEX, "grid index out of range");
  const auto& trace = r.traces[t];
  info->primal = r.certs[t].primal;
  info->dual = r.certs[t].dual;
  info->gap = r.certs[t].gap;
  info->passes = r.passes[t];
  info->n_active = trace.empty() ? r.betas[t].size() : trace.back().n_active;
  info->converged = r.converged[t] ? 1 : 0;
  info->elapsed_ms = r.timings_ms[t];
  return GS_OK;
}

void gs_path_free(gs_path* path) { delete path; }

void gs_bench_options_init(gs_bench_options* opts) {
  if (!opts) return;
  const gapsafe::RunConfig d;
  *opts = gs_bench_options{};
  opts->data_path = nullptr;
  opts->format = GS_FORMAT_SVMLIGHT;
  opts->synth_n = d.synth.n;
  opts->synth_p = d.synth.p;
  opts->synth_density = d.synth.density;
  opts->synth_snr = d.synth.snr;
  opts->grid_T = d.grid_T;
  opts->grid_delta = d.grid_delta;
  opts->screen_every = d.screen_every;
  opts->max_passes = d.max_passes;
  opts->l1_ratio = d.l1_ratio;
  opts->out_dir = nullptr;
  opts->seed = d.seed;
}

int gs_benchmark_run(const gs_bench_options* opts, gs_bench_run* runs_out, size_t capacity,
                     size_t* n_runs) {
  GS_REQUIRE(opts);
  if (opts->n_rules > 0) GS_REQUIRE(opts->rules);
  if (opts->n_epsilons > 0) GS_REQUIRE(opts->epsilons);
  return guarded([&] {
    gapsafe::RunConfig c;
    c.data_path = opts->data_path ? opts->data_path : "";
    c.format = to_format(opts->format);
    c.synth = gapsafe::SynthSpec{opts->synth_n, opts->synth_p, opts->synth_density,
                                 opts->synth_snr};
    c.rules.clear();
    for (size_t k = 0; k < opts->n_rules; ++k) c.rules.push_back(to_rule(opts->rules[k]));
    c.grid_T = opts->grid_T;
    c.grid_delta = opts->grid_delta;
    c.epsilons.assign(opts->epsilons, opts->epsilons + opts->n_epsilons);
    c.screen_every = opts->screen_every;
    c.max_passes = opts->max_passes;
    c.l1_ratio = opts->l1_ratio;
    c.normalize = opts->normalize != 0;
    c.out_dir = opts->out_dir ? opts->out_dir : "";
    c.seed = opts->seed;
    c.parallel_rules = opts->parallel_rules != 0;
    const gapsafe::BenchmarkReport rep = gapsafe::run_benchmark(c);
    if (n_runs) *n_runs = rep.runs.size();
    for (size_t k = 0; k < rep.runs.size() && k < capacity && runs_out; ++k) {
      const gapsafe::RunSummary& s = rep.runs[k];
      runs_out[k] = gs_bench_run{from_rule(s.rule), s.epsilon, s.total_ms,
                                 s.n_lambdas,       s.converged, s.passes};
    }
  });
}

}  // extern "C"
