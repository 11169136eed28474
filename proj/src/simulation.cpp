#include "regcheck/simulation.hpp"

#include <chrono>
#include <optional>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "regcheck/parallel.hpp"
#include "regcheck/rng.hpp"

namespace regcheck {

std::string study_statistic_name(StudyStatistic s) {
  switch (s) {
    case StudyStatistic::Cvm: return "CvM";
    case StudyStatistic::Tcvm: return "TCvM";
    case StudyStatistic::CvmDirectional: return "CvM_d";
    case StudyStatistic::TcvmDirectional: return "TCvM_d";
  }
  throw std::logic_error("unreachable");
}

StudyStatistic study_statistic_from_name(const std::string& s) {
  if (s == "CvM") return StudyStatistic::Cvm;
  if (s == "TCvM") return StudyStatistic::Tcvm;
  if (s == "CvM_d") return StudyStatistic::CvmDirectional;
  if (s == "TCvM_d") return StudyStatistic::TcvmDirectional;
  throw std::invalid_argument("unknown statistic: " + s);
}

namespace {

bool needs_table(StudyStatistic s) {
  return s == StudyStatistic::Tcvm || s == StudyStatistic::TcvmDirectional;
}

bool is_directional(StudyStatistic s) {
  return s == StudyStatistic::CvmDirectional || s == StudyStatistic::TcvmDirectional;
}

StatKind stat_kind(StudyStatistic s) {
  return needs_table(s) ? StatKind::Tcvm : StatKind::Cvm;
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg, const BrownianCvmTable* table) {
  if (cfg.reps < 1) throw std::invalid_argument("run_study: reps < 1");
  if (cfg.scenarios.empty()) throw std::invalid_argument("run_study: no scenarios");
  if (cfg.statistics.empty()) throw std::invalid_argument("run_study: no statistics");

  BrownianCvmTable local_table;
  bool any_tcvm = false;
  for (auto s : cfg.statistics) any_tcvm = any_tcvm || needs_table(s);
  if (any_tcvm && !table) {
    local_table = load_or_build_brownian_table(cfg.table_paths, cfg.table_grid,
                                               cfg.table_seed,
                                               default_table_cache_path(),
                                               cfg.threads);
    table = &local_table;
  }

  StudyReport report;
  report.config = cfg;

  int cell_index = 0;
  for (const Scenario& scenario : cfg.scenarios) {
    const MeanModel null_model = scenario_null_model(scenario);
    for (StudyStatistic statistic : cfg.statistics) {
      for (double a : cfg.amplitudes) {
        for (double c : cfg.bandwidth_constants) {
          const auto t0 = std::chrono::steady_clock::now();
          Scenario cell_scenario = scenario;
          cell_scenario.a = a;

          std::vector<unsigned char> reject(static_cast<std::size_t>(cfg.reps), 0);
          std::vector<unsigned char> failed(static_cast<std::size_t>(cfg.reps), 0);
          std::string first_error;
          std::mutex error_mutex;

          const std::uint64_t scenario_seed =
              mix_seed(cfg.seed, hash_tag(scenario.name));
          const std::uint64_t cell_seed =
              mix_seed(scenario_seed, static_cast<std::uint64_t>(cell_index));

          parallel_for(cfg.reps, cfg.threads, [&](int r) {
            const std::uint64_t rep_seed =
                mix_seed(cell_seed, static_cast<std::uint64_t>(r));
            try {
              const Dataset data = make_dgp(cell_scenario, rep_seed);
              TestConfig tc;
              tc.level = cfg.level;
              tc.kernel.c = c;
              tc.trim = cfg.trim;
              tc.v_n = cfg.v_n;
              tc.seed = rep_seed;
              tc.threads = 1;  // parallelism lives at the replication level
              tc.table = table;
              std::optional<MeanModel> alt_model;
              if (is_directional(statistic))
                alt_model = scenario_alternative_model(cell_scenario);
              const WeightSpec weight = alt_model
                                            ? WeightSpec::directional(*alt_model)
                                            : WeightSpec::omnibus();
              const Method method = needs_table(statistic)
                                        ? Method::asymptotic()
                                        : Method::bootstrap(cfg.bootstrap_B);
              const TestResult res = run_mean_test(data, null_model, weight,
                                                   stat_kind(statistic), method, tc);
              reject[static_cast<std::size_t>(r)] = res.reject ? 1 : 0;
            } catch (const std::exception& e) {
              failed[static_cast<std::size_t>(r)] = 1;
              std::lock_guard<std::mutex> lock(error_mutex);
              if (first_error.empty()) first_error = e.what();
            }
          });

          StudyCell cell;
          cell.scenario = scenario.name;
          cell.statistic = study_statistic_name(statistic);
          cell.covariance = cov_kind_name(scenario.covariance);
          cell.n = scenario.n;
          cell.p = scenario.p();
          cell.a = a;
          cell.c = c;
          int rejects = 0, failures = 0;
          for (int r = 0; r < cfg.reps; ++r) {
            rejects += reject[static_cast<std::size_t>(r)];
            failures += failed[static_cast<std::size_t>(r)];
          }
          cell.failures = failures;
          const int effective = cfg.reps - failures;
          if (failures > cfg.reps / 100) {
            cell.valid = false;
            cell.invalid_reason = std::to_string(failures) + " of " +
                                  std::to_string(cfg.reps) +
                                  " replications failed: " + first_error;
            cell.rate = std::nan("");
            cell.se = std::nan("");
          } else {
            cell.rate = static_cast<double>(rejects) / std::max(effective, 1);
            cell.se = std::sqrt(cell.rate * (1.0 - cell.rate) / std::max(effective, 1));
          }
          cell.seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
          report.cells.push_back(std::move(cell));
          ++cell_index;
        }
      }
    }
  }
  return report;
}

namespace {

std::string format_fixed(double v, int places) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(places);
  os << v;
  return os.str();
}

}  // namespace

std::string emit_table(const StudyReport& report, const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    os << "scenario,statistic,covariance,n,p,a,c,rate,se,time\n";
    for (const StudyCell& cell : report.cells) {
      os << cell.scenario << ',' << cell.statistic << ',' << cell.covariance << ','
         << cell.n << ',' << cell.p << ',' << format_fixed(cell.a, 4) << ','
         << format_fixed(cell.c, 4) << ',' << format_fixed(cell.rate, 4) << ','
         << format_fixed(cell.se, 4) << ',' << format_fixed(cell.seconds, 3) << '\n';
    }
    return os.str();
  }
  if (format == "markdown") {
    os << "| scenario | statistic | covariance | n | p | a | c | rate | se | time |\n";
    os << "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const StudyCell& cell : report.cells) {
      os << "| " << cell.scenario << " | " << cell.statistic << " | "
         << cell.covariance << " | " << cell.n << " | " << cell.p << " | "
         << format_fixed(cell.a, 4) << " | " << format_fixed(cell.c, 4) << " | "
         << format_fixed(cell.rate, 4) << " | " << format_fixed(cell.se, 4) << " | "
         << format_fixed(cell.seconds, 3) << " |";
      if (!cell.valid) os << " invalid: " << cell.invalid_reason;
      os << '\n';
    }
    return os.str();
  }
  throw std::invalid_argument("emit_table: unknown format " + format);
}

}  // namespace regcheck
