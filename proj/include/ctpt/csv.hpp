#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace ctpt {

/// Numeric CSV table: one required header row, comma separation, plain
/// decimal-point numbers (locale independent), UTF-8.
struct CsvTable {
  std::vector<std::string> headers;
  Eigen::MatrixXd values;  // rows x columns

  Eigen::Index column_index(const std::string& name) const;  // throws ValidationError
  Eigen::VectorXd column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

}  // namespace ctpt
