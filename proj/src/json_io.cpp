#include "regcheck/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace regcheck {

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j{{"name", s.name},
                   {"n", s.n},
                   {"covariance", cov_kind_name(s.covariance)},
                   {"a", s.a}};
  if (s.p_override > 0) j["p"] = s.p_override;
  if (s.alpha != 0.0) j["alpha"] = s.alpha;
  if (!s.deviation_name.empty()) j["deviation"] = s.deviation_name;
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.value("name", "H11");
  s.n = j.value("n", 100);
  s.p_override = j.value("p", 0);
  if (j.contains("covariance"))
    s.covariance = cov_kind_from_name(j["covariance"].get<std::string>());
  s.a = j.value("a", 0.0);
  s.alpha = j.value("alpha", 0.0);
  if (j.contains("deviation")) {
    s.deviation_name = j["deviation"].get<std::string>();
    s.deviation = deviation_from_name(s.deviation_name, s.p());
  }
  return s;
}

nlohmann::json brownian_table_to_json(const BrownianCvmTable& t) {
  return nlohmann::json{{"levels", t.levels}, {"quantiles", t.quantiles},
                        {"M", t.paths},       {"K", t.grid},
                        {"seed", t.seed},     {"mean", t.mean_stat}};
}

BrownianCvmTable brownian_table_from_json(const nlohmann::json& j) {
  BrownianCvmTable t;
  t.levels = j.at("levels").get<std::vector<double>>();
  t.quantiles = j.at("quantiles").get<std::vector<double>>();
  t.paths = j.at("M").get<int>();
  t.grid = j.at("K").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.mean_stat = j.value("mean", 0.0);
  if (t.levels.size() != t.quantiles.size())
    throw std::runtime_error("brownian table: levels/quantiles size mismatch");
  return t;
}

BrownianCvmTable load_or_build_brownian_table(int paths, int grid,
                                              std::uint64_t seed,
                                              const std::string& cache_path,
                                              int threads) {
  if (!cache_path.empty()) {
    std::ifstream in(cache_path);
    if (in) {
      try {
        nlohmann::json j;
        in >> j;
        BrownianCvmTable t = brownian_table_from_json(j);
        if (t.paths == paths && t.grid == grid && t.seed == seed) return t;
      } catch (...) {
        // meta mismatch or corrupt file: rebuild below
      }
    }
  }
  BrownianCvmTable t =
      simulate_brownian_cvm_table(paths, grid, seed, default_table_levels(), threads);
  if (!cache_path.empty()) {
    std::error_code ec;
    const auto parent = std::filesystem::path(cache_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(cache_path);
    if (out) out << brownian_table_to_json(t).dump(2) << '\n';
  }
  return t;
}

nlohmann::json test_result_to_json(const TestResult& r) {
  return nlohmann::json{
      {"statistic", r.statistic},
      {"critical_value", r.critical_value},
      {"p_value", r.p_value},
      {"reject", r.reject},
      {"meta",
       {{"seed", r.meta.seed},
        {"bandwidth_c", r.meta.bandwidth_c},
        {"bandwidth", r.meta.bandwidth},
        {"trim", r.meta.trim},
        {"bootstrap_B", r.meta.bootstrap_B},
        {"v_n", r.meta.v_n},
        {"weight_kind", r.meta.weight_kind},
        {"statistic", r.meta.statistic},
        {"method", r.meta.method},
        {"n", r.meta.n},
        {"p", r.meta.p},
        {"warnings", r.meta.warnings}}}};
}

StudyConfig study_config_from_json(const nlohmann::json& j) {
  StudyConfig cfg;
  for (const auto& js : j.at("scenarios"))
    cfg.scenarios.push_back(scenario_from_json(js));
  for (const auto& name : j.at("statistics"))
    cfg.statistics.push_back(study_statistic_from_name(name.get<std::string>()));
  if (j.contains("amplitudes"))
    cfg.amplitudes = j["amplitudes"].get<std::vector<double>>();
  if (j.contains("bandwidth_constants"))
    cfg.bandwidth_constants = j["bandwidth_constants"].get<std::vector<double>>();
  cfg.reps = j.value("reps", cfg.reps);
  cfg.bootstrap_B = j.value("bootstrap", cfg.bootstrap_B);
  cfg.level = j.value("level", cfg.level);
  cfg.trim = j.value("trim", cfg.trim);
  cfg.v_n = j.value("v_n", cfg.v_n);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.table_paths = j.value("table_paths", cfg.table_paths);
  cfg.table_grid = j.value("table_grid", cfg.table_grid);
  cfg.table_seed = j.value("table_seed", cfg.table_seed);
  return cfg;
}

nlohmann::json study_config_to_json(const StudyConfig& cfg) {
  nlohmann::json scenarios = nlohmann::json::array();
  for (const Scenario& s : cfg.scenarios) scenarios.push_back(scenario_to_json(s));
  nlohmann::json stats = nlohmann::json::array();
  for (StudyStatistic s : cfg.statistics) stats.push_back(study_statistic_name(s));
  return nlohmann::json{{"scenarios", scenarios},
                        {"statistics", stats},
                        {"amplitudes", cfg.amplitudes},
                        {"bandwidth_constants", cfg.bandwidth_constants},
                        {"reps", cfg.reps},
                        {"bootstrap", cfg.bootstrap_B},
                        {"level", cfg.level},
                        {"trim", cfg.trim},
                        {"v_n", cfg.v_n},
                        {"seed", cfg.seed},
                        {"threads", cfg.threads},
                        {"table_paths", cfg.table_paths},
                        {"table_grid", cfg.table_grid},
                        {"table_seed", cfg.table_seed}};
}

}  // namespace regcheck
