#include "dgik/edm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace dgik {

Matrix gram_from_points(const Matrix& p) { return p * p.transpose(); }

Matrix edm_from_gram(const Matrix& x) {
  const long n = x.rows();
  if (x.cols() != n) throw ShapeMismatch("edm_from_gram: square matrix required");
  Matrix d(n, n);
  for (long u = 0; u < n; ++u) {
    d(u, u) = 0.0;
    for (long v = u + 1; v < n; ++v) {
      const double val = x(u, u) + x(v, v) - 2.0 * x(u, v);
      d(u, v) = val;
      d(v, u) = val;
    }
  }
  return d;
}

Matrix gram_from_edm(const Matrix& d) {
  const long n = d.rows();
  if (d.cols() != n) throw ShapeMismatch("gram_from_edm: square matrix required");
  const Vector row_mean = d.rowwise().mean();
  const double grand_mean = row_mean.mean();
  Matrix x(n, n);
  for (long u = 0; u < n; ++u)
    for (long v = 0; v < n; ++v)
      x(u, v) = -0.5 * (d(u, v) - row_mean(u) - row_mean(v) + grand_mean);
  return x;
}

Matrix points_from_gram(const Matrix& x, int k) {
  const long n = x.rows();
  if (x.cols() != n) throw ShapeMismatch("points_from_gram: square matrix required");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(x);
  // Eigen returns eigenvalues ascending; take the k largest in descending order.
  Matrix p = Matrix::Zero(n, k);
  for (int j = 0; j < k && j < n; ++j) {
    const long idx = n - 1 - j;
    const double lambda = eig.eigenvalues()(idx);
    if (lambda > 0.0) p.col(j) = eig.eigenvectors().col(idx) * std::sqrt(lambda);
  }
  return p;
}

Matrix procrustes_align(const Matrix& p, const AnchorSet& anchors) {
  const int k = static_cast<int>(p.cols());
  const int m = static_cast<int>(anchors.indices.size());
  if (anchors.targets.rows() != m || anchors.targets.cols() != k)
    throw ShapeMismatch("procrustes_align: anchor targets shape");
  if (m < k + 1) throw DegenerateAnchors("procrustes_align: need at least K+1 anchors");

  Matrix src(m, k);
  for (int i = 0; i < m; ++i) {
    const int row = anchors.indices[static_cast<size_t>(i)];
    if (row < 0 || row >= p.rows()) throw ShapeMismatch("procrustes_align: anchor index");
    src.row(i) = p.row(row);
  }
  const Eigen::RowVectorXd c_src = src.colwise().mean();
  const Eigen::RowVectorXd c_tgt = anchors.targets.colwise().mean();
  const Matrix src_c = src.rowwise() - c_src;
  const Matrix tgt_c = anchors.targets.rowwise() - c_tgt;

  const auto rank_ok = [k](const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    return sv(k - 1) > 1e-10 * std::max(1.0, sv(0));
  };
  if (!rank_ok(src_c)) throw DegenerateAnchors("procrustes_align: anchor sources rank-deficient");
  if (!rank_ok(tgt_c)) throw DegenerateAnchors("procrustes_align: anchor targets rank-deficient");

  // R = argmin over O(K) of sum ||R s_i - t_i||^2 for centered anchors.
  const Matrix h = src_c.transpose() * tgt_c;
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix r = svd.matrixV() * svd.matrixU().transpose();

  Matrix aligned = (p.rowwise() - c_src) * r.transpose();
  aligned.rowwise() += c_tgt;
  return aligned;
}

}  // namespace dgik
