#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace unrolldiff {

struct DataSet {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXd labels;    // n
};

/// Reads a libsvm-format text file: one sample per line, `label idx:val ...`
/// with 1-based feature indices.  Missing entries are zero; the feature
/// dimension is the largest index seen.
DataSet read_libsvm(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // n x columns, all numeric
};

/// Reads a CSV file with a header row and numeric columns.
CsvTable read_csv(const std::string& path);

/// CSV table as a dataset: `target_column` holds the labels, every other
/// column is a feature.
DataSet dataset_from_csv(const CsvTable& table, int target_column = 0);

}  // namespace unrolldiff
