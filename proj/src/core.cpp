#include "altmin/core.hpp"

#include <Eigen/Eigenvalues>

namespace altmin {

double operator_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  // sqrt of the top eigenvalue of A^T A; robust for dense desk-scale input.
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * a);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace altmin
