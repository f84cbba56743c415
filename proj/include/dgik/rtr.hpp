#pragma once

// Riemannian trust-region outer loop with a truncated conjugate-gradient
// subproblem solver. The objective is abstract so synthetic quadratics can be
// run through the same machinery as the completion cost.

#include <memory>

#include "dgik/completion.hpp"
#include "dgik/types.hpp"

namespace dgik {

struct RtrParams {
  double delta_bar = 1.0;   // max trust radius
  double delta0 = 0.125;    // initial radius, in (0, delta_bar]
  double rho_prime = 0.1;   // step acceptance threshold, in [0, 1/4)
  int max_iters = 2000;
  double grad_tol = 1e-9;
  int tcg_max_iters = 100;
  double tcg_kappa = 0.1;
  double tcg_theta = 1.0;

  // delta_bar = sqrt(N*K), delta0 = delta_bar/8, tcg cap 2*N*K.
  static RtrParams defaults(int n, int k);
  void validate() const;
};

enum class Termination {
  GradientTolerance,
  MaxIterations,
  RadiusCollapse,
  IllConditioned,
};
const char* to_string(Termination t);

struct RtrResult {
  Matrix point;
  double cost = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  Termination termination = Termination::MaxIterations;
};

class RtrObjective {
 public:
  // Cached evaluation at one point. gradient() and hess_vec() are horizontal
  // at that point; hess_vec uses state frozen at the evaluation point.
  class PointEval {
   public:
    virtual ~PointEval() = default;
    virtual double cost() const = 0;
    virtual const Matrix& gradient() const = 0;
    virtual Matrix hess_vec(const Matrix& z) const = 0;
  };

  virtual ~RtrObjective() = default;
  virtual double cost(const Matrix& p) const = 0;
  virtual std::unique_ptr<PointEval> evaluate(const Matrix& p) const = 0;
};

// Completion cost lifted to the quotient manifold.
class CompletionObjective : public RtrObjective {
 public:
  explicit CompletionObjective(const CostModel& model) : model_(&model) {}
  double cost(const Matrix& p) const override { return model_->cost(p); }
  std::unique_ptr<PointEval> evaluate(const Matrix& p) const override;

 private:
  const CostModel* model_;
};

// m_P(Z) = phi(P) + <grad, Z> + 1/2 <Z, Hess[Z]>.
double model_value(const RtrObjective& obj, const Matrix& p, const Matrix& z);

// Approximate minimizer of the quadratic model within the trust region.
// Terminates on relative residual reduction, negative curvature (step
// extended to the boundary), boundary hit, or the iteration cap.
Matrix tcg_solve(const RtrObjective& obj, const Matrix& p, double delta, const RtrParams& params);

// rho = (phi(P) - phi(P+Z)) / (m(0) - m(Z)). Throws DegenerateModelDecrease
// when the predicted decrease underflows.
double rho_ratio(const RtrObjective& obj, const Matrix& p, const Matrix& z);

RtrResult rtr_solve(const RtrObjective& obj, Matrix p0, const RtrParams& params);

// Convenience: completion problem end to end.
RtrResult rtr_solve(const CostModel& model, Matrix p0, const RtrParams& params);

}  // namespace dgik
