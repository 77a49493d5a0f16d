#pragma once

#include <Eigen/Dense>

namespace popda {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;  // ||A x - b||
  int iterations = 0;
};

/// min ||A x - b|| subject to x >= 0, by the Lawson-Hanson active-set
/// method. Columns that never improve the fit stay at exactly zero.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace popda
