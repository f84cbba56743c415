#include "dgik/rtr.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "dgik/manifold.hpp"

namespace dgik {

RtrParams RtrParams::defaults(int n, int k) {
  RtrParams p;
  p.delta_bar = std::sqrt(static_cast<double>(n) * k);
  p.delta0 = p.delta_bar / 8.0;
  p.tcg_max_iters = 2 * n * k;
  return p;
}

void RtrParams::validate() const {
  if (!(delta_bar > 0.0)) throw Error("RtrParams: delta_bar must be positive");
  if (!(delta0 > 0.0 && delta0 <= delta_bar)) throw Error("RtrParams: delta0 not in (0, delta_bar]");
  if (!(rho_prime >= 0.0 && rho_prime < 0.25)) throw Error("RtrParams: rho_prime not in [0, 1/4)");
  if (!(grad_tol > 0.0)) throw Error("RtrParams: grad_tol must be positive");
  if (max_iters < 0 || tcg_max_iters < 1) throw Error("RtrParams: iteration caps");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance: return "GradientTolerance";
    case Termination::MaxIterations: return "MaxIterations";
    case Termination::RadiusCollapse: return "RadiusCollapse";
    case Termination::IllConditioned: return "IllConditioned";
  }
  return "Unknown";
}

namespace {

class CompletionEval : public RtrObjective::PointEval {
 public:
  CompletionEval(const CostModel& model, const Matrix& p)
      : model_(&model), p_(p), eval_(model.evaluate(p)) {
    grad_ = riemannian_gradient(p_, model_->gradient_at(eval_));
  }
  double cost() const override { return eval_.cost; }
  const Matrix& gradient() const override { return grad_; }
  Matrix hess_vec(const Matrix& z) const override {
    return riemannian_hess_vec(p_, z, [this](const Matrix& zz) {
      return model_->hess_vec_at(eval_, zz);
    });
  }

 private:
  const CostModel* model_;
  Matrix p_;
  CostModel::Eval eval_;
  Matrix grad_;
};

double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

// Positive root of ||z + tau*d||^2 = delta^2.
double boundary_step(const Matrix& z, const Matrix& d, double delta) {
  const double dd = inner(d, d);
  const double zd = inner(z, d);
  const double zz = inner(z, z);
  const double disc = zd * zd + dd * (delta * delta - zz);
  return (-zd + std::sqrt(std::max(disc, 0.0))) / dd;
}

Matrix tcg_core(const RtrObjective::PointEval& eval, double delta, const RtrParams& params,
                bool* hit_boundary) {
  *hit_boundary = false;
  const Matrix& grad = eval.gradient();
  Matrix z = Matrix::Zero(grad.rows(), grad.cols());
  Matrix r = grad;
  double rr = inner(r, r);
  const double r0 = std::sqrt(rr);
  if (r0 == 0.0) return z;
  const double threshold = r0 * std::min(params.tcg_kappa, std::pow(r0, params.tcg_theta));
  Matrix d = -r;
  for (int j = 0; j < params.tcg_max_iters; ++j) {
    const Matrix hd = eval.hess_vec(d);
    const double dhd = inner(d, hd);
    if (dhd <= 0.0) {
      z += boundary_step(z, d, delta) * d;
      *hit_boundary = true;
      return z;
    }
    const double alpha = rr / dhd;
    const double zz = inner(z, z);
    const double zd = inner(z, d);
    const double dd = inner(d, d);
    if (zz + 2.0 * alpha * zd + alpha * alpha * dd >= delta * delta) {
      z += boundary_step(z, d, delta) * d;
      *hit_boundary = true;
      return z;
    }
    z += alpha * d;
    r += alpha * hd;
    const double rr_next = inner(r, r);
    if (std::sqrt(rr_next) <= threshold) return z;
    d = (rr_next / rr) * d - r;
    rr = rr_next;
  }
  return z;
}

double predicted_decrease(const RtrObjective::PointEval& eval, const Matrix& z) {
  return -(inner(eval.gradient(), z) + 0.5 * inner(z, eval.hess_vec(z)));
}

// One deterministic retry with tiny noise when the base point loses rank.
Matrix perturbed(const Matrix& p) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double scale = 1e-8 * std::max(1.0, p.cwiseAbs().maxCoeff());
  Matrix out = p;
  for (long i = 0; i < out.rows(); ++i)
    for (long j = 0; j < out.cols(); ++j) out(i, j) += scale * dist(rng);
  return out;
}

}  // namespace

std::unique_ptr<RtrObjective::PointEval> CompletionObjective::evaluate(const Matrix& p) const {
  return std::make_unique<CompletionEval>(*model_, p);
}

double model_value(const RtrObjective& obj, const Matrix& p, const Matrix& z) {
  const auto eval = obj.evaluate(p);
  return eval->cost() + inner(eval->gradient(), z) + 0.5 * inner(z, eval->hess_vec(z));
}

Matrix tcg_solve(const RtrObjective& obj, const Matrix& p, double delta, const RtrParams& params) {
  if (!(delta > 0.0)) throw Error("tcg_solve: radius must be positive");
  bool hit = false;
  return tcg_core(*obj.evaluate(p), delta, params, &hit);
}

double rho_ratio(const RtrObjective& obj, const Matrix& p, const Matrix& z) {
  const auto eval = obj.evaluate(p);
  const double pred = predicted_decrease(*eval, z);
  if (pred <= 1e-15 * (1.0 + std::abs(eval->cost())))
    throw DegenerateModelDecrease("rho_ratio: predicted decrease underflow");
  return (eval->cost() - obj.cost(p + z)) / pred;
}

RtrResult rtr_solve(const RtrObjective& obj, Matrix p0, const RtrParams& params) {
  params.validate();

  // Evaluate with a single perturb-and-retry when the point is rank-deficient.
  const auto evaluate_guarded =
      [&obj](Matrix& p) -> std::unique_ptr<RtrObjective::PointEval> {
    try {
      return obj.evaluate(p);
    } catch (const RankDeficientBase&) {
      p = perturbed(p);
      return obj.evaluate(p);  // a second failure propagates
    }
  };

  RtrResult result;
  Matrix p = std::move(p0);
  double delta = params.delta0;

  std::unique_ptr<RtrObjective::PointEval> eval;
  try {
    eval = evaluate_guarded(p);
  } catch (const RankDeficientBase&) {
    result.point = p;
    result.termination = Termination::IllConditioned;
    return result;
  }

  for (int iter = 0; iter < params.max_iters; ++iter) {
    const double grad_norm = eval->gradient().norm();
    if (grad_norm <= params.grad_tol) {
      result.termination = Termination::GradientTolerance;
      result.point = p;
      result.cost = eval->cost();
      result.grad_norm = grad_norm;
      result.iterations = iter;
      return result;
    }
    if (delta < 1e-14) {
      result.termination = Termination::RadiusCollapse;
      result.point = p;
      result.cost = eval->cost();
      result.grad_norm = grad_norm;
      result.iterations = iter;
      return result;
    }

    bool hit_boundary = false;
    const Matrix z = tcg_core(*eval, delta, params, &hit_boundary);
    const double pred = predicted_decrease(*eval, z);
    const Matrix candidate = p + z;

    double rho;
    if (pred <= 1e-15 * (1.0 + std::abs(eval->cost()))) {
      rho = -std::numeric_limits<double>::infinity();  // reject and shrink
    } else {
      rho = (eval->cost() - obj.cost(candidate)) / pred;
    }

    if (rho < 0.25) {
      delta *= 0.25;
    } else if (rho > 0.75 && hit_boundary) {
      delta = std::min(2.0 * delta, params.delta_bar);
    }

    if (rho > params.rho_prime) {
      p = candidate;
      try {
        eval = evaluate_guarded(p);
      } catch (const RankDeficientBase&) {
        result.point = p;
        result.cost = obj.cost(p);
        result.termination = Termination::IllConditioned;
        result.iterations = iter + 1;
        return result;
      }
    }
    result.iterations = iter + 1;
  }

  result.termination = Termination::MaxIterations;
  result.point = p;
  result.cost = eval->cost();
  result.grad_norm = eval->gradient().norm();
  return result;
}

RtrResult rtr_solve(const CostModel& model, Matrix p0, const RtrParams& params) {
  CompletionObjective obj(model);
  return rtr_solve(obj, std::move(p0), params);
}

}  // namespace dgik
