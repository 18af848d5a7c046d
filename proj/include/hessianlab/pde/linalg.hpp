#pragma once

#include <Eigen/Dense>

#include "hessianlab/types.hpp"

namespace hessianlab::pde {

// eigenvalues of a small symmetric matrix, sorted descending; 2x2 by the
// explicit formula, 3x3 by Eigen's closed-form direct solver
inline VectorXd symmetric_eigenvalues(const MatrixXd& H) {
  const int n = int(H.rows());
  VectorXd out(n);
  if (n == 2) {
    double m = 0.5 * (H(0, 0) + H(1, 1));
    double d = 0.5 * (H(0, 0) - H(1, 1));
    double rad = std::sqrt(d * d + H(0, 1) * H(1, 0));
    out[0] = m + rad;
    out[1] = m - rad;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  if (n == 3) {
    Eigen::Matrix3d h3 = H;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es3;
    es3.computeDirect(h3, Eigen::EigenvaluesOnly);
    for (int i = 0; i < 3; ++i) out[i] = es3.eigenvalues()[2 - i];
    return out;
  }
  es.compute(H, Eigen::EigenvaluesOnly);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[n - 1 - i];
  return out;
}

inline double spectral_norm_sym(const MatrixXd& H) {
  VectorXd ev = symmetric_eigenvalues(H);
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

}  // namespace hessianlab::pde
