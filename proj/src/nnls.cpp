#include "popda/nnls.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace popda {

namespace {

// Unconstrained least squares restricted to the passive columns.
Eigen::VectorXd solve_passive(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(A.cols());
  if (cols.empty()) return z;
  Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    sub.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
  }
  Eigen::VectorXd s = sub.colPivHouseholderQr().solve(b);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    z(cols[k]) = s(static_cast<Eigen::Index>(k));
  }
  return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != b.size()) {
    throw std::invalid_argument("nnls: A and b have different row counts");
  }
  const Eigen::Index n = A.cols();
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max<double>(1.0, A.cwiseAbs().maxCoeff()) *
                     static_cast<double>(std::max(A.rows(), n));
  const int max_iter = 3 * static_cast<int>(std::max<Eigen::Index>(n, 1)) + 30;

  NnlsResult res;
  res.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd w = A.transpose() * (b - A * res.x);

  while (res.iterations < max_iter) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    ++res.iterations;

    Eigen::VectorXd s = solve_passive(A, b, passive);
    // Inner loop: step back toward feasibility while a passive entry is
    // non-positive.
    for (int inner = 0; inner < max_iter; ++inner) {
      double step = 1.0;
      bool infeasible = false;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= tol) {
          infeasible = true;
          const double denom = res.x(j) - s(j);
          if (denom > 0.0) step = std::min(step, res.x(j) / denom);
        }
      }
      if (!infeasible) break;
      res.x += step * (s - res.x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && res.x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          res.x(j) = 0.0;
        }
      }
      s = solve_passive(A, b, passive);
    }
    res.x = s;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)]) res.x(j) = 0.0;
    }
    w = A.transpose() * (b - A * res.x);
  }
  res.x = res.x.cwiseMax(0.0);
  res.residual_norm = (A * res.x - b).norm();
  return res;
}

}  // namespace popda
