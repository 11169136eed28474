#include "regcheck/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace regcheck {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void standardize_column(Eigen::Ref<Vec> col) {
  const double mean = col.mean();
  col.array() -= mean;
  const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(col.size() - 1));
  if (sd > 0) col /= sd;
}

}  // namespace

CsvData ingest_csv(const std::string& path, const std::string& response_column,
                   bool standardize) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("ingest_csv: empty file " + path);
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.empty()) throw std::runtime_error("ingest_csv: empty header row");

  const auto resp_it = std::find(header.begin(), header.end(), response_column);
  if (resp_it == header.end())
    throw std::runtime_error("ingest_csv: response column '" + response_column +
                             "' not found");
  const int resp_idx = static_cast<int>(resp_it - header.begin());
  const int ncols = static_cast<int>(header.size());
  if (ncols < 2)
    throw std::runtime_error("ingest_csv: need at least one predictor column");

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != ncols)
      throw std::runtime_error("ingest_csv: row " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(ncols));
    std::vector<double> row(static_cast<std::size_t>(ncols));
    for (int j = 0; j < ncols; ++j) {
      const std::string cell = trim(fields[static_cast<std::size_t>(j)]);
      try {
        std::size_t used = 0;
        row[static_cast<std::size_t>(j)] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (...) {
        throw std::runtime_error("ingest_csv: non-numeric cell at row " +
                                 std::to_string(line_no) + ", column '" +
                                 header[static_cast<std::size_t>(j)] + "'");
      }
    }
    rows.push_back(std::move(row));
  }

  const int n = static_cast<int>(rows.size());
  if (n < 2) throw std::runtime_error("ingest_csv: need at least 2 data rows");
  const int d = ncols - 1;

  CsvData out;
  out.response_name = response_column;
  out.data.x.resize(n, d);
  out.data.y.resize(n);
  int xj = 0;
  for (int j = 0; j < ncols; ++j) {
    if (j == resp_idx) continue;
    out.predictor_names.push_back(header[static_cast<std::size_t>(j)]);
    ++xj;
  }
  for (int i = 0; i < n; ++i) {
    out.data.y[i] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(resp_idx)];
    int k = 0;
    for (int j = 0; j < ncols; ++j) {
      if (j == resp_idx) continue;
      out.data.x(i, k++) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  if (standardize) {
    for (int j = 0; j < d; ++j) standardize_column(out.data.x.col(j));
    standardize_column(out.data.y);
  }
  if (n < 10) out.notes.push_back("fewer than 10 rows; results are unreliable");
  out.data.validate();
  return out;
}

}  // namespace regcheck
