#include "dgik/manifold.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace dgik {

double metric(const Matrix& p, const Matrix& z1, const Matrix& z2) {
  require_same_shape(p, z1, "metric");
  require_same_shape(p, z2, "metric");
  return z1.cwiseProduct(z2).sum();
}

Matrix horizontal_project(const Matrix& p, const Matrix& z) {
  require_same_shape(p, z, "horizontal_project");
  const int k = static_cast<int>(p.cols());

  // C A + A C = B with A = P^T P symmetric positive definite and B skew.
  // Diagonalize A = Q L Q^T; in that basis C_ij = B_ij / (l_i + l_j).
  const Matrix a = p.transpose() * p;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Vector& lambda = eig.eigenvalues();
  if (lambda(0) <= 1e-20)  // sigma_min(P)^2
    throw RankDeficientBase("horizontal_project: base point is rank-deficient");

  const Matrix b = p.transpose() * z - z.transpose() * p;
  const Matrix& q = eig.eigenvectors();
  Matrix b_tilde = q.transpose() * b * q;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) b_tilde(i, j) /= lambda(i) + lambda(j);
  const Matrix c = q * b_tilde * q.transpose();
  return z - p * c;
}

Matrix retract(const Matrix& p, const Matrix& w) {
  require_same_shape(p, w, "retract");
  return p + w;
}

Matrix riemannian_gradient(const Matrix& p, const Matrix& egrad) {
  return horizontal_project(p, egrad);
}

Matrix riemannian_hess_vec(const Matrix& p, const Matrix& z,
                           const std::function<Matrix(const Matrix&)>& ehess_vec) {
  return horizontal_project(p, ehess_vec(z));
}

}  // namespace dgik
