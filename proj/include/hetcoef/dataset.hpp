#ifndef HETCOEF_DATASET_HPP_
#define HETCOEF_DATASET_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hetcoef {

// Columnar sample. The treatment block is a matrix so the same container
// carries a scalar treatment (one column) or T mutually exclusive dummies.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  std::optional<std::vector<int>> z;  // discrete instrument codes 0..M-1
  std::optional<Eigen::VectorXd> v;   // control variable in [0,1]

  Eigen::Index n() const { return y.size(); }
  Eigen::Index x_columns() const { return x.cols(); }

  // Column lengths, finiteness, v range, z codes. Throws DataError.
  void validate() const;

  // Rows must be {0,1}^T with row sum <= 1.
  void validate_mutually_exclusive() const;
};

// CSV with a header row: column `y`, then `x` (scalar) or `x1..xT`,
// optional `z`, optional `v`. UTF-8, '.' decimal separator.
Dataset read_dataset_csv(const std::string& path);
Dataset read_dataset_csv(std::istream& in, const std::string& origin = "");
void write_dataset_csv(const Dataset& data, std::ostream& out);

// Serializes and renames into place so readers never observe a partial
// file.
void write_dataset_csv(const Dataset& data, const std::string& path);
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace hetcoef

#endif  // HETCOEF_DATASET_HPP_
