#include "unrolldiff/datasets.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace unrolldiff {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

double parse_number(const std::string& token, const std::string& path, int line_no) {
  size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != token.size() || token.empty()) {
    throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                ": expected a number, got '" + token + "'");
  }
  return value;
}

}  // namespace

DataSet read_libsvm(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<double> labels;
  std::vector<std::vector<std::pair<int, double>>> rows;
  int max_index = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;  // blank line
    labels.push_back(parse_number(token, path, line_no));
    rows.emplace_back();
    while (ls >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                    ": expected idx:value, got '" + token + "'");
      }
      const int index =
          static_cast<int>(parse_number(token.substr(0, colon), path, line_no));
      const double value = parse_number(token.substr(colon + 1), path, line_no);
      if (index < 1) {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                    ": feature indices are 1-based");
      }
      max_index = std::max(max_index, index);
      rows.back().emplace_back(index - 1, value);
    }
  }
  if (rows.empty()) throw std::invalid_argument(path + ": no samples");
  DataSet data;
  data.features = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), max_index);
  data.labels = Eigen::Map<Eigen::VectorXd>(labels.data(), static_cast<int>(labels.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [j, v] : rows[i]) data.features(static_cast<int>(i), j) = v;
  }
  return data;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty file");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
  }
  if (table.header.empty()) throw std::invalid_argument(path + ": empty header row");
  std::vector<double> values;
  int n_rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    int n_cols = 0;
    while (std::getline(ls, cell, ',')) {
      values.push_back(parse_number(cell, path, line_no));
      ++n_cols;
    }
    if (n_cols != static_cast<int>(table.header.size())) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": row width differs from header");
    }
    ++n_rows;
  }
  if (n_rows == 0) throw std::invalid_argument(path + ": no data rows");
  const int n_cols = static_cast<int>(table.header.size());
  table.values.resize(n_rows, n_cols);
  for (int i = 0; i < n_rows; ++i) {
    for (int j = 0; j < n_cols; ++j) table.values(i, j) = values[i * n_cols + j];
  }
  return table;
}

DataSet dataset_from_csv(const CsvTable& table, int target_column) {
  const int n_cols = static_cast<int>(table.header.size());
  if (target_column < 0 || target_column >= n_cols) {
    throw std::invalid_argument("dataset_from_csv: target column out of range");
  }
  if (n_cols < 2) throw std::invalid_argument("dataset_from_csv: need at least two columns");
  DataSet data;
  data.labels = table.values.col(target_column);
  data.features.resize(table.values.rows(), n_cols - 1);
  int out = 0;
  for (int j = 0; j < n_cols; ++j) {
    if (j == target_column) continue;
    data.features.col(out++) = table.values.col(j);
  }
  return data;
}

}  // namespace unrolldiff
