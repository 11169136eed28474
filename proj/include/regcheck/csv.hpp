#pragma once

#include <string>
#include <vector>

#include "regcheck/models.hpp"

namespace regcheck {

struct CsvData {
  Dataset data;
  std::vector<std::string> predictor_names;
  std::string response_name;
  std::vector<std::string> notes;  // e.g. small-sample warning
};

// Comma-separated, '.' decimal, UTF-8, header row required, numeric cells.
// The named response column becomes y; everything else becomes x. With
// `standardize`, every column (predictors and response) is scaled to mean 0,
// sd 1.
CsvData ingest_csv(const std::string& path, const std::string& response_column,
                   bool standardize);

}  // namespace regcheck
