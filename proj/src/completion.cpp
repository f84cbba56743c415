#include "dgik/completion.hpp"

#include <cmath>

namespace dgik {

namespace {

void check_mask_pair(const Matrix& mask, const Matrix& values, int n, const char* what) {
  if (mask.rows() != n || mask.cols() != n || values.rows() != n || values.cols() != n)
    throw ShapeMismatch(std::string("CompletionProblem: ") + what);
  for (int u = 0; u < n; ++u) {
    if (mask(u, u) != 0.0) throw MalformedGraph(std::string(what) + ": nonzero diagonal");
    for (int v = 0; v < n; ++v) {
      const double m = mask(u, v);
      if (m != 0.0 && m != 1.0) throw MalformedGraph(std::string(what) + ": mask not binary");
      if (m != mask(v, u)) throw MalformedGraph(std::string(what) + ": mask not symmetric");
      if (m != 0.0 && values(u, v) != values(v, u))
        throw MalformedGraph(std::string(what) + ": values not symmetric");
    }
  }
}

Matrix transposed(const Matrix& p) {
  Matrix pt(p.cols(), p.rows());
  for (long u = 0; u < p.rows(); ++u)
    for (long c = 0; c < p.cols(); ++c) pt(c, u) = p(u, c);
  return pt;
}

}  // namespace

void CompletionProblem::validate() const {
  const int nn = n();
  if (dim != 2 && dim != 3) throw MalformedGraph("CompletionProblem: dim must be 2 or 3");
  check_mask_pair(omega, d_tilde, nn, "omega");
  check_mask_pair(psi_lower, d_lower, nn, "psi_lower");
  check_mask_pair(psi_upper, d_upper, nn, "psi_upper");
  for (int u = 0; u < nn; ++u) {
    for (int v = 0; v < nn; ++v) {
      if (omega(u, v) != 0.0 && d_tilde(u, v) < 0.0)
        throw MalformedGraph("CompletionProblem: negative squared target");
      if (omega(u, v) != 0.0 && (psi_lower(u, v) != 0.0 || psi_upper(u, v) != 0.0))
        throw MalformedGraph("CompletionProblem: equality and interval masks overlap");
      if (psi_lower(u, v) != 0.0 && psi_upper(u, v) != 0.0 && d_lower(u, v) > d_upper(u, v))
        throw MalformedGraph("CompletionProblem: lower bound exceeds upper bound");
    }
  }
}

CostModel::CostModel(CompletionProblem problem, kernels::Kind kind)
    : problem_(std::move(problem)), ops_(&kernels::select(kind)) {
  problem_.validate();
}

void CostModel::check_point(const Matrix& p) const {
  if (p.rows() != problem_.n() || p.cols() != problem_.dim)
    throw ShapeMismatch("CostModel: point has wrong shape");
}

CostModel::Eval CostModel::evaluate(const Matrix& p) const {
  check_point(p);
  const int nn = problem_.n();
  const int k = problem_.dim;
  Eval e;
  e.pt = transposed(p);
  Matrix d(nn, nn);
  ops_->pairwise_sqdist(e.pt.data(), nn, k, d.data());
  e.s.resize(nn, nn);
  e.w.resize(nn, nn);
  e.cost = ops_->masked_residual(d.data(), problem_.omega.data(), problem_.d_tilde.data(),
                                 problem_.psi_lower.data(), problem_.d_lower.data(),
                                 problem_.psi_upper.data(), problem_.d_upper.data(), nn,
                                 e.s.data(), e.w.data());
  return e;
}

Matrix CostModel::gradient_at(const Eval& e) const {
  const int nn = problem_.n();
  const int k = problem_.dim;
  Matrix gt(k, nn);
  ops_->apply_weights(e.s.data(), e.pt.data(), nn, k, gt.data());
  return transposed(gt);
}

Matrix CostModel::hess_vec_at(const Eval& e, const Matrix& z) const {
  check_point(z);
  const int nn = problem_.n();
  const int k = problem_.dim;
  const Matrix zt = transposed(z);
  Matrix ed(nn, nn);
  ops_->pairwise_cross(e.pt.data(), zt.data(), nn, k, ed.data());
  Matrix s_dot(nn, nn);
  ops_->hadamard_neg(e.w.data(), ed.data(), nn, s_dot.data());
  Matrix gt(k, nn);
  ops_->apply_weights(s_dot.data(), e.pt.data(), nn, k, gt.data());
  Matrix gt2(k, nn);
  ops_->apply_weights(e.s.data(), zt.data(), nn, k, gt2.data());
  gt += gt2;
  return transposed(gt);
}

double CostModel::cost(const Matrix& p) const { return evaluate(p).cost; }

Matrix CostModel::euclidean_gradient(const Matrix& p) const { return gradient_at(evaluate(p)); }

Matrix CostModel::euclidean_hess_vec(const Matrix& p, const Matrix& z) const {
  return hess_vec_at(evaluate(p), z);
}

ResidualSummary CostModel::problem_residual(const Matrix& p) const {
  check_point(p);
  const int nn = problem_.n();
  const Matrix pt = transposed(p);
  Matrix d(nn, nn);
  ops_->pairwise_sqdist(pt.data(), nn, problem_.dim, d.data());
  ResidualSummary r;
  for (int u = 0; u < nn; ++u) {
    for (int v = 0; v < nn; ++v) {
      if (problem_.omega(u, v) != 0.0)
        r.max_equality = std::max(r.max_equality, std::abs(problem_.d_tilde(u, v) - d(u, v)));
      if (problem_.psi_lower(u, v) != 0.0)
        r.max_lower_violation = std::max(r.max_lower_violation, problem_.d_lower(u, v) - d(u, v));
      if (problem_.psi_upper(u, v) != 0.0)
        r.max_upper_violation = std::max(r.max_upper_violation, d(u, v) - problem_.d_upper(u, v));
    }
  }
  r.max_lower_violation = std::max(r.max_lower_violation, 0.0);
  r.max_upper_violation = std::max(r.max_upper_violation, 0.0);
  return r;
}

}  // namespace dgik
