#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace alphasign {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Malformed inputs: bad files, misaligned dates, invalid dimensions or options.
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numeric procedure could not produce a valid result: rank deficiency,
/// non-convergence, degenerate statistics.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Excess returns paired with the factor realizations they are regressed on.
struct Panel {
  MatrixXd returns;  // T x N
  MatrixXd factors;  // T x p
  std::vector<std::string> dates;   // optional row labels, size T or empty
  std::vector<std::string> assets;  // optional column labels, size N or empty

  Index T() const { return returns.rows(); }
  Index N() const { return returns.cols(); }
  Index p() const { return factors.cols(); }

  void validate() const;
};

}  // namespace alphasign
