#pragma once

#include <json.hpp>

#include "regcheck/models.hpp"
#include "regcheck/simulation.hpp"
#include "regcheck/test_stats.hpp"

namespace regcheck {

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json brownian_table_to_json(const BrownianCvmTable& t);
BrownianCvmTable brownian_table_from_json(const nlohmann::json& j);

nlohmann::json test_result_to_json(const TestResult& r);

StudyConfig study_config_from_json(const nlohmann::json& j);
nlohmann::json study_config_to_json(const StudyConfig& cfg);

}  // namespace regcheck
