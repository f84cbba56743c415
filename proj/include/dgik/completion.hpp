#pragma once

// The distance-matrix completion objective over point sets P:
//
//   phi(P) = 1/2 ||Omega .* (Dt - K(P P^T))||_F^2
//          + 1/2 ||max(Psi- .* (Dlo - K(P P^T)), 0)||_F^2
//          + 1/2 ||max(Psi+ .* (K(P P^T) - Dhi), 0)||_F^2
//
// where K maps a Gram matrix to squared pairwise distances. Both symmetric
// entries of each edge contribute. Gradient and Hessian-vector products are
// assembled from the residual matrix S via 4*(S - diag(S*1))*M; interval
// terms use the active set frozen at the evaluation point.

#include "dgik/kernels.hpp"
#include "dgik/types.hpp"

namespace dgik {

struct CompletionProblem {
  Matrix omega;      // 0/1 equality mask, symmetric, zero diagonal
  Matrix d_tilde;    // squared target distances where omega = 1
  Matrix psi_lower;  // 0/1 lower-bound mask
  Matrix d_lower;    // squared lower bounds where psi_lower = 1
  Matrix psi_upper;  // 0/1 upper-bound mask
  Matrix d_upper;    // squared upper bounds where psi_upper = 1
  int dim = 0;

  int n() const { return static_cast<int>(omega.rows()); }
  // Enforces the structural invariants (symmetry, zero diagonals, mask
  // disjointness, bound ordering); throws ShapeMismatch / MalformedGraph.
  void validate() const;
};

struct ResidualSummary {
  double max_equality = 0.0;     // max |Dt - K| over equality edges (squared meters)
  double max_lower_violation = 0.0;
  double max_upper_violation = 0.0;
};

// Evaluation engine bound to one problem. Pure/stateless: concurrent calls
// with distinct points are safe. Kernel variant chosen once at construction.
class CostModel {
 public:
  explicit CostModel(CompletionProblem problem, kernels::Kind kind = kernels::Kind::Auto);

  const CompletionProblem& problem() const { return problem_; }
  int n() const { return problem_.n(); }
  int dim() const { return problem_.dim; }
  const char* kernel_name() const { return ops_->name; }

  double cost(const Matrix& p) const;
  Matrix euclidean_gradient(const Matrix& p) const;
  Matrix euclidean_hess_vec(const Matrix& p, const Matrix& z) const;
  ResidualSummary problem_residual(const Matrix& p) const;

  // Cached evaluation at a fixed point: cost, residual matrix S, and the
  // active-set mask W. Hessian products reuse the frozen state.
  struct Eval {
    double cost = 0.0;
    Matrix pt;  // K x N transposed point set
    Matrix s;   // combined residual matrix
    Matrix w;   // omega + active interval indicators
  };
  Eval evaluate(const Matrix& p) const;
  Matrix gradient_at(const Eval& e) const;
  Matrix hess_vec_at(const Eval& e, const Matrix& z) const;

 private:
  void check_point(const Matrix& p) const;

  CompletionProblem problem_;
  const kernels::Ops* ops_;
};

}  // namespace dgik
