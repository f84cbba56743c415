#pragma once

// Geometry of the fixed-rank quotient R_*^{NxK} / O(K): trace metric,
// horizontal projection, flat retraction, and horizontal lifts of Euclidean
// derivatives. Vertical directions are P*Q with Q skew; horizontal vectors
// satisfy Z^T P = P^T Z.

#include <functional>

#include "dgik/types.hpp"

namespace dgik {

// tr(Z1^T Z2), the flat inner product on N x K matrices.
double metric(const Matrix& p, const Matrix& z1, const Matrix& z2);

// Z - P*C where the skew-symmetric C solves C P^T P + P^T P C = P^T Z - Z^T P.
// Identity on horizontal inputs; maps vertical inputs to zero. Throws
// RankDeficientBase when sigma_min(P) <= 1e-10.
Matrix horizontal_project(const Matrix& p, const Matrix& z);

// Flat retraction P + W.
Matrix retract(const Matrix& p, const Matrix& w);

// Horizontal lift of the Euclidean gradient.
Matrix riemannian_gradient(const Matrix& p, const Matrix& egrad);

// Projected directional derivative of the lifted gradient; ehess_vec supplies
// the Euclidean Hessian-vector product at p in direction z.
Matrix riemannian_hess_vec(const Matrix& p, const Matrix& z,
                           const std::function<Matrix(const Matrix&)>& ehess_vec);

}  // namespace dgik
