// Command-line front end: run the mean/variance specification tests on CSV
// data, run Monte Carlo studies from a JSON config, build the Brownian CvM
// quantile table, and dump processes for plotting.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "regcheck/csv.hpp"
#include "regcheck/empirical_process.hpp"
#include "regcheck/json_io.hpp"
#include "regcheck/martingale.hpp"
#include "regcheck/simulation.hpp"
#include "regcheck/test_stats.hpp"

namespace {

using namespace regcheck;

struct CommonTestArgs {
  std::string data_path;
  std::string response;
  bool standardize = false;
  std::string model = "linear";
  std::string weight = "omnibus";
  std::string statistic = "cvm";
  std::string method = "bootstrap";
  int B = 300;
  std::uint64_t seed = 0;
  double level = 0.05;
  double bandwidth_c = 1.0;
  double trim = 0.95;
  double v_n = 0.2;
  int threads = 0;
  std::string table_path;
};

void add_common_flags(CLI::App* cmd, CommonTestArgs& a) {
  cmd->add_option("--data", a.data_path, "CSV file with a header row")->required();
  cmd->add_option("--response", a.response, "response column name")->required();
  cmd->add_flag("--standardize", a.standardize,
                "scale every column to mean 0, sd 1");
  cmd->add_option("--model", a.model, "mean model (linear)");
  cmd->add_option("--weight", a.weight,
                  "omnibus | directional-quadratic | directional-cos");
  cmd->add_option("--statistic", a.statistic, "cvm | tcvm");
  cmd->add_option("--method", a.method, "bootstrap | asymptotic");
  cmd->add_option("--B", a.B, "bootstrap replications");
  cmd->add_option("--seed", a.seed, "RNG seed");
  cmd->add_option("--level", a.level, "significance level");
  cmd->add_option("--bandwidth-c", a.bandwidth_c, "c in h = c n^{-1/10}");
  cmd->add_option("--trim", a.trim, "trim quantile for the transformed statistic");
  cmd->add_option("--vn", a.v_n, "bootstrap smoothing parameter");
  cmd->add_option("--threads", a.threads, "worker threads (0 = all)");
  cmd->add_option("--table", a.table_path, "Brownian CvM table JSON (asymptotic)");
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  return hw > 0 ? hw : 1;
}

MeanModel resolve_model(const std::string& name, int d) {
  if (name == "linear") return linear_model(d);
  throw std::invalid_argument("unknown mean model: " + name);
}

VarianceModel resolve_variance_model(const std::string& name, int d) {
  if (name == "constant") return constant_variance_model();
  if (name == "exp-linear") return exp_linear_variance_model(d);
  throw std::invalid_argument("unknown variance model: " + name);
}

struct ResolvedWeight {
  WeightSpec spec;
  MeanModel alt_storage;  // keeps the alternative model alive
};

ResolvedWeight resolve_weight_spec(const std::string& name, int d) {
  ResolvedWeight rw;
  if (name == "omnibus") {
    rw.spec = WeightSpec::omnibus();
  } else if (name == "directional-quadratic") {
    rw.alt_storage = quadratic_index_model(d);
    rw.spec = WeightSpec::directional(rw.alt_storage);
  } else if (name == "directional-cos") {
    rw.alt_storage = cosine_index_model(d, 0.6 * 3.14159265358979323846);
    rw.spec = WeightSpec::directional(rw.alt_storage);
  } else {
    throw std::invalid_argument("unknown weight kind: " + name);
  }
  return rw;
}

StatKind resolve_statistic(const std::string& s) {
  if (s == "cvm") return StatKind::Cvm;
  if (s == "tcvm") return StatKind::Tcvm;
  throw std::invalid_argument("unknown statistic: " + s);
}

// Loads --table if given, else the cache (REGCHECK_CACHE_DIR), else simulates.
BrownianCvmTable acquire_table(const std::string& table_path, int threads) {
  if (!table_path.empty()) {
    std::ifstream in(table_path);
    if (!in) throw std::runtime_error("cannot open table file " + table_path);
    nlohmann::json j;
    in >> j;
    return brownian_table_from_json(j);
  }
  return load_or_build_brownian_table(100000, 2000, 1, default_table_cache_path(),
                                      threads);
}

TestConfig build_config(const CommonTestArgs& a) {
  TestConfig cfg;
  cfg.level = a.level;
  cfg.kernel.c = a.bandwidth_c;
  cfg.trim = a.trim;
  cfg.v_n = a.v_n;
  cfg.seed = a.seed;
  cfg.threads = resolve_threads(a.threads);
  return cfg;
}

int run_test_command(const CommonTestArgs& a, bool variance,
                     const std::string& variance_model_name) {
  const CsvData csv = ingest_csv(a.data_path, a.response, a.standardize);
  for (const auto& note : csv.notes) std::cerr << "warning: " << note << '\n';
  const int d = csv.data.dim();

  const MeanModel model = resolve_model(a.model, d);
  ResolvedWeight weight = resolve_weight_spec(a.weight, d);
  const StatKind stat = resolve_statistic(a.statistic);
  const Method method = a.method == "asymptotic"
                            ? Method::asymptotic()
                            : Method::bootstrap(a.B);

  TestConfig cfg = build_config(a);
  BrownianCvmTable table;
  if (method.kind == MethodKind::Asymptotic) {
    table = acquire_table(a.table_path, cfg.threads);
    cfg.table = &table;
  }

  TestResult res;
  if (variance) {
    const VarianceModel vmodel = resolve_variance_model(variance_model_name, d);
    res = run_variance_test(csv.data, model, vmodel, weight.spec, stat, method, cfg);
  } else {
    res = run_mean_test(csv.data, model, weight.spec, stat, method, cfg);
  }
  for (const auto& warning : res.meta.warnings)
    std::cerr << "warning: " << warning << '\n';
  std::cout << test_result_to_json(res).dump(2) << std::endl;
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& format, int threads_override) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config " + config_path);
  nlohmann::json j;
  in >> j;
  StudyConfig cfg = study_config_from_json(j);
  if (threads_override > 0) cfg.threads = threads_override;
  if (cfg.threads == 0) cfg.threads = resolve_threads(0);
  const StudyReport report = run_study(cfg);
  const std::string text = emit_table(report, format);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
  }
  for (const StudyCell& cell : report.cells)
    if (!cell.valid)
      std::cerr << "warning: invalid cell " << cell.scenario << '/' << cell.statistic
                << ": " << cell.invalid_reason << '\n';
  return 0;
}

int run_calibrate(int paths, int grid, std::uint64_t seed, const std::string& out,
                  int threads) {
  const BrownianCvmTable table = simulate_brownian_cvm_table(
      paths, grid, seed, default_table_levels(), resolve_threads(threads));
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << brownian_table_to_json(table).dump(2) << '\n';
  std::cout << "wrote " << out << " (95% quantile "
            << table.quantile(0.95) << ")\n";
  return 0;
}

int run_dump_process(const CommonTestArgs& a, bool transformed,
                     const std::string& out_path) {
  const CsvData csv = ingest_csv(a.data_path, a.response, a.standardize);
  const int d = csv.data.dim();
  const MeanModel model = resolve_model(a.model, d);
  const MeanFit fit = fit_mean_ls(csv.data, model, Vec());

  ResolvedWeight weight = resolve_weight_spec(a.weight, d);
  WeightVector w;
  if (weight.spec.kind == WeightSpec::Kind::Omnibus) {
    w = omnibus_weight(csv.data, model, fit, estimate_central_subspace(csv.data));
  } else {
    const MeanFit alt_fit =
        fit_mean_ls(csv.data, *weight.spec.alt_model,
                    [&] {
                      Vec init = Vec::Zero(weight.spec.alt_model->dim_param);
                      init.head(fit.beta.size()) = fit.beta;
                      return init;
                    }());
    w = directional_weight(csv.data, model, fit, *weight.spec.alt_model, alt_fit);
  }
  StepProcess proc = build_process(fit.residuals, w);
  if (transformed) {
    KernelConfig kernel;
    kernel.c = a.bandwidth_c;
    const ScoreTable score = score_table(fit.residuals, kernel, TestKind::Mean);
    const TransformMachinery mach = build_machinery(proc, score);
    proc = transform_process(proc, mach);
  }
  std::ofstream os(out_path);
  if (!os) throw std::runtime_error("cannot write " + out_path);
  dump_process_csv(proc, os);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checks for regression mean and variance functions via "
               "weighted residual empirical processes"};
  app.require_subcommand(1);

  CommonTestArgs mean_args;
  CLI::App* test_mean = app.add_subcommand("test-mean", "test a mean function class");
  add_common_flags(test_mean, mean_args);

  CommonTestArgs var_args;
  std::string variance_model = "constant";
  CLI::App* test_var =
      app.add_subcommand("test-variance", "test a variance function class");
  add_common_flags(test_var, var_args);
  test_var->add_option("--variance-model", variance_model, "constant | exp-linear");

  std::string sim_config, sim_out, sim_format = "csv";
  int sim_threads = 0;
  CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo study");
  simulate->add_option("--config", sim_config, "StudyConfig JSON")->required();
  simulate->add_option("--out", sim_out, "output file (default stdout)");
  simulate->add_option("--format", sim_format, "csv | markdown");
  simulate->add_option("--threads", sim_threads, "worker threads (0 = all)");

  int cal_paths = 100000, cal_grid = 2000, cal_threads = 0;
  std::uint64_t cal_seed = 1;
  std::string cal_out = "cvm_table.json";
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "simulate the Brownian CvM quantile table");
  calibrate->add_option("--paths", cal_paths, "Monte Carlo paths");
  calibrate->add_option("--grid", cal_grid, "time grid size");
  calibrate->add_option("--seed", cal_seed, "RNG seed");
  calibrate->add_option("--out", cal_out, "output JSON path");
  calibrate->add_option("--threads", cal_threads, "worker threads (0 = all)");

  CommonTestArgs dump_args;
  bool dump_transformed = false;
  std::string dump_out = "process.csv";
  CLI::App* dump = app.add_subcommand("dump-process",
                                      "write the residual process as t,value CSV");
  add_common_flags(dump, dump_args);
  dump->add_flag("--transformed", dump_transformed, "dump the transformed process");
  dump->add_option("--out", dump_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (test_mean->parsed()) return run_test_command(mean_args, false, "");
    if (test_var->parsed()) return run_test_command(var_args, true, variance_model);
    if (simulate->parsed())
      return run_simulate(sim_config, sim_out, sim_format, sim_threads);
    if (calibrate->parsed())
      return run_calibrate(cal_paths, cal_grid, cal_seed, cal_out, cal_threads);
    if (dump->parsed()) return run_dump_process(dump_args, dump_transformed, dump_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
