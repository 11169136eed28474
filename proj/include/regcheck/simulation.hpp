#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regcheck/models.hpp"
#include "regcheck/test_stats.hpp"

namespace regcheck {

// CvM/TCvM are the omnibus tests (SDR-driven weight); the _d variants fit the
// scenario's directional alternative class. Raw-process statistics are
// calibrated by the smooth residual bootstrap, transformed ones by the
// simulated Brownian table.
enum class StudyStatistic { Cvm, Tcvm, CvmDirectional, TcvmDirectional };

std::string study_statistic_name(StudyStatistic s);
StudyStatistic study_statistic_from_name(const std::string& s);

struct StudyConfig {
  std::vector<Scenario> scenarios;
  std::vector<StudyStatistic> statistics;
  std::vector<double> amplitudes{0.0};
  std::vector<double> bandwidth_constants{1.0};
  int reps = 500;
  int bootstrap_B = 300;
  double level = 0.05;
  double trim = 0.95;
  double v_n = 0.2;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  int table_paths = 100000;
  int table_grid = 2000;
  std::uint64_t table_seed = 20240601;
};

struct StudyCell {
  std::string scenario;
  std::string statistic;
  std::string covariance;
  int n = 0;
  int p = 0;
  double a = 0.0;
  double c = 1.0;
  double rate = 0.0;
  double se = 0.0;
  double seconds = 0.0;
  int failures = 0;
  bool valid = true;
  std::string invalid_reason;
};

struct StudyReport {
  StudyConfig config;
  std::vector<StudyCell> cells;
};

// Monte Carlo over cells = scenario x statistic x amplitude x bandwidth.
// Replication r of cell c draws its seed as
// mix(mix(mix(master, tag(scenario)), c), r); results are identical whatever
// the thread count. A cell with more than 1% failed replications is marked
// invalid and keeps the failure reason.
StudyReport run_study(const StudyConfig& cfg,
                      const BrownianCvmTable* table = nullptr);

// "csv" (stable column order: scenario,statistic,covariance,n,p,a,c,rate,se,time)
// or "markdown".
std::string emit_table(const StudyReport& report, const std::string& format);

}  // namespace regcheck
