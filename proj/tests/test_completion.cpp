#include <doctest.h>

#include <random>

#include "dgik/completion.hpp"
#include "dgik/manifold.hpp"
#include "test_util.hpp"

using namespace dgik;

namespace {

CompletionProblem empty_problem(int n, int k) {
  CompletionProblem prob;
  prob.dim = k;
  prob.omega = Matrix::Zero(n, n);
  prob.d_tilde = Matrix::Zero(n, n);
  prob.psi_lower = Matrix::Zero(n, n);
  prob.d_lower = Matrix::Zero(n, n);
  prob.psi_upper = Matrix::Zero(n, n);
  prob.d_upper = Matrix::Zero(n, n);
  return prob;
}

void set_equality(CompletionProblem& prob, int u, int v, double sq) {
  prob.omega(u, v) = prob.omega(v, u) = 1.0;
  prob.d_tilde(u, v) = prob.d_tilde(v, u) = sq;
}

void set_lower(CompletionProblem& prob, int u, int v, double sq) {
  prob.psi_lower(u, v) = prob.psi_lower(v, u) = 1.0;
  prob.d_lower(u, v) = prob.d_lower(v, u) = sq;
}

void set_upper(CompletionProblem& prob, int u, int v, double sq) {
  prob.psi_upper(u, v) = prob.psi_upper(v, u) = 1.0;
  prob.d_upper(u, v) = prob.d_upper(v, u) = sq;
}

// Mixed equality/interval problem around a noisy realization.
CompletionProblem random_problem(std::mt19937_64& rng, int n, int k) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Matrix p = test::random_matrix(rng, n, k);
  CompletionProblem prob = empty_problem(n, k);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const double d = (p.row(u) - p.row(v)).squaredNorm();
      const double pick = unit(rng);
      if (pick < 0.4) {
        set_equality(prob, u, v, std::max(0.0, d + 0.3 * (unit(rng) - 0.5)));
      } else if (pick < 0.6) {
        set_lower(prob, u, v, d * (0.8 + 0.6 * unit(rng)));  // often active
      } else if (pick < 0.8) {
        set_upper(prob, u, v, d * (0.6 + 0.6 * unit(rng)));
      }
    }
  return prob;
}

}  // namespace

TEST_CASE("cost: consistent realizations, hand-computed single edges") {
  std::mt19937_64 rng(41);
  const int n = 5, k = 2;
  const Matrix p = test::random_matrix(rng, n, k);

  // All constrained distances satisfied exactly: zero cost.
  CompletionProblem prob = empty_problem(n, k);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      set_equality(prob, u, v, (p.row(u) - p.row(v)).squaredNorm());
  set_lower(prob, 0, 1, 0.5 * (p.row(0) - p.row(1)).squaredNorm());
  prob.omega(0, 1) = prob.omega(1, 0) = 0.0;  // keep masks disjoint on (0,1)
  CostModel model(prob);
  CHECK(model.cost(p) == doctest::Approx(0.0).epsilon(1e-15));

  // Single equality edge with squared target 4, points at distance 1: both
  // symmetric entries contribute, (1/2)*2*(4-1)^2 = 9.
  Matrix two = Matrix::Zero(2, 2);
  two(1, 0) = 1.0;
  CompletionProblem single = empty_problem(2, 2);
  set_equality(single, 0, 1, 4.0);
  CHECK(CostModel(single).cost(two) == doctest::Approx(9.0));

  // Lower bound 4 with actual squared distance 1 penalizes the same way.
  CompletionProblem lower = empty_problem(2, 2);
  set_lower(lower, 0, 1, 4.0);
  CHECK(CostModel(lower).cost(two) == doctest::Approx(9.0));

  // Lower bound satisfied: no cost.
  Matrix far = Matrix::Zero(2, 2);
  far(1, 0) = std::sqrt(5.0);
  CHECK(CostModel(lower).cost(far) == doctest::Approx(0.0));
}

TEST_CASE("euclidean_gradient: zero at a global minimum, finite differences, translations") {
  std::mt19937_64 rng(42);
  const int n = 6, k = 3;
  const Matrix p = test::random_matrix(rng, n, k);
  CompletionProblem prob = empty_problem(n, k);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      set_equality(prob, u, v, (p.row(u) - p.row(v)).squaredNorm());
  CHECK(CostModel(prob).euclidean_gradient(p).cwiseAbs().maxCoeff() < 1e-12);

  // 20 random problem/point pairs against central finite differences.
  for (int trial = 0; trial < 20; ++trial) {
    const int nn = 4 + static_cast<int>(rng() % 5);
    const int kk = trial % 2 == 0 ? 2 : 3;
    const CompletionProblem rp = random_problem(rng, nn, kk);
    const CostModel model(rp);
    const Matrix q = test::random_matrix(rng, nn, kk);
    const Matrix grad = model.euclidean_gradient(q);

    double max_rel = 0.0;
    const double h = 1e-6 * (1.0 + q.cwiseAbs().maxCoeff());
    for (int i = 0; i < nn; ++i)
      for (int c = 0; c < kk; ++c) {
        Matrix qp = q, qm = q;
        qp(i, c) += h;
        qm(i, c) -= h;
        const double fd = (model.cost(qp) - model.cost(qm)) / (2.0 * h);
        max_rel = std::max(max_rel,
                           std::abs(fd - grad(i, c)) / std::max(1.0, std::abs(fd)));
      }
    CHECK(max_rel <= 1e-6);

    // Rows sum to zero: the cost only depends on pairwise differences.
    CHECK(grad.colwise().sum().cwiseAbs().maxCoeff() <=
          1e-9 * std::max(1.0, grad.norm()));
  }
}

TEST_CASE("euclidean_hess_vec: zero map, linearity, finite differences of the gradient") {
  std::mt19937_64 rng(43);
  const int n = 7, k = 3;
  // Equality-only problem keeps the cost twice differentiable along the path.
  const Matrix p = test::random_matrix(rng, n, k);
  CompletionProblem prob = empty_problem(n, k);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (unit(rng) < 0.7)
        set_equality(prob, u, v,
                     std::max(0.0, (p.row(u) - p.row(v)).squaredNorm() + 0.2 * (unit(rng) - 0.5)));
  const CostModel model(prob);
  const Matrix q = test::random_matrix(rng, n, k);

  CHECK(model.euclidean_hess_vec(q, Matrix::Zero(n, k)).cwiseAbs().maxCoeff() == 0.0);

  const Matrix z = test::random_matrix(rng, n, k);
  const Matrix hz = model.euclidean_hess_vec(q, z);
  const Matrix h2z = model.euclidean_hess_vec(q, (2.0 * z).eval());
  CHECK((h2z - 2.0 * hz).cwiseAbs().maxCoeff() == 0.0);  // exact with a frozen active set

  const double t = 1e-6;
  const Matrix fd = (model.euclidean_gradient(q + t * z) - model.euclidean_gradient(q)) / t;
  CHECK((hz - fd).norm() <= 1e-4 * std::max(1.0, fd.norm()));
}

TEST_CASE("hessian is symmetric in the trace inner product (equality-only)") {
  std::mt19937_64 rng(44);
  const int n = 6, k = 3;
  const Matrix p = test::random_matrix(rng, n, k);
  CompletionProblem prob = empty_problem(n, k);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      set_equality(prob, u, v, (p.row(u) - p.row(v)).squaredNorm() + 0.1);
  const CostModel model(prob);
  const Matrix q = test::random_matrix(rng, n, k);
  const auto eval = model.evaluate(q);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix z1 = test::random_matrix(rng, n, k);
    const Matrix z2 = test::random_matrix(rng, n, k);
    const double a = metric(q, model.hess_vec_at(eval, z1), z2);
    const double b = metric(q, z1, model.hess_vec_at(eval, z2));
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
  }
}

TEST_CASE("problem_residual: readouts and equivalence with zero cost") {
  const int n = 3, k = 2;
  Matrix p(n, k);
  p << 0, 0, 1, 0, 0, 1;
  CompletionProblem prob = empty_problem(n, k);
  set_equality(prob, 0, 1, 1.0);
  set_lower(prob, 1, 2, 2.0);
  CostModel model(prob);
  ResidualSummary r = model.problem_residual(p);
  CHECK(r.max_equality == doctest::Approx(0.0));
  CHECK(r.max_lower_violation == doctest::Approx(0.0));
  CHECK(r.max_upper_violation == doctest::Approx(0.0));
  CHECK(model.cost(p) == doctest::Approx(0.0));

  CompletionProblem off = empty_problem(n, k);
  set_equality(off, 0, 1, 1.5);
  r = CostModel(off).problem_residual(p);
  CHECK(r.max_equality == doctest::Approx(0.5));

  CompletionProblem lo = empty_problem(n, k);
  set_lower(lo, 0, 1, 1.3);
  r = CostModel(lo).problem_residual(p);
  CHECK(r.max_equality == 0.0);
  CHECK(r.max_lower_violation == doctest::Approx(0.3));
  CHECK(r.max_upper_violation == 0.0);
}

TEST_CASE("cost is invariant to rigid transformations") {
  std::mt19937_64 rng(45);
  const int n = 6, k = 3;
  const CompletionProblem prob = random_problem(rng, n, k);
  const CostModel model(prob);
  const Matrix p = test::random_matrix(rng, n, k);
  const Matrix r = test::random_orthogonal(rng, k);
  const Eigen::RowVectorXd t = test::random_matrix(rng, 1, k).row(0);
  Matrix moved = p * r.transpose();
  moved.rowwise() += t;
  CHECK(model.cost(moved) ==
        doctest::Approx(model.cost(p)).epsilon(1e-10));
}

TEST_CASE("problem validation rejects malformed inputs") {
  CompletionProblem prob = empty_problem(3, 2);
  set_equality(prob, 0, 1, 1.0);
  prob.psi_lower(0, 1) = prob.psi_lower(1, 0) = 1.0;  // overlaps the equality mask
  CHECK_THROWS_AS(CostModel{prob}, MalformedGraph);

  CompletionProblem bad_bounds = empty_problem(3, 2);
  set_lower(bad_bounds, 0, 1, 2.0);
  set_upper(bad_bounds, 0, 1, 1.0);
  CHECK_THROWS_AS(CostModel{bad_bounds}, MalformedGraph);

  CompletionProblem ok = empty_problem(3, 2);
  set_equality(ok, 0, 2, 1.0);
  const CostModel model(ok);
  CHECK_THROWS_AS(model.cost(Matrix::Zero(2, 2)), ShapeMismatch);
}
