#pragma once

// Dense inner-loop kernels behind the distance-matrix completion solver.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. The two are equivalence-tested against each
// other; everything above this layer is kernel-agnostic.
//
// Conventions:
//  - n x n matrices are row-major, contiguous.
//  - Point sets are passed transposed ("pt layout"): k rows of length n, so
//    each coordinate axis is a contiguous array that vectorizes cleanly.

namespace dgik::kernels {

// d[u*n+v] = sum_k (pt[k*n+u] - pt[k*n+v])^2
using PairwiseSqdistFn = void (*)(const double* pt, int n, int k, double* d);

// e[u*n+v] = 2 * sum_k (pt[k*n+u] - pt[k*n+v]) * (zt[k*n+u] - zt[k*n+v])
// (directional derivative of the squared-distance matrix along z)
using PairwiseCrossFn = void (*)(const double* pt, const double* zt, int n, int k, double* e);

// Residual of the completion objective at squared-distance matrix d:
//   s = omega.*(dtilde - d) + max(psi_lo.*(d_lo - d), 0) - max(psi_hi.*(d - d_hi), 0)
//   w = omega + [lower bound active] + [upper bound active]
// Returns 0.5 * (||omega residual||^2 + ||lower violations||^2 + ||upper violations||^2)
// summed over all n^2 entries. Masks are 0/1 matrices.
using MaskedResidualFn = double (*)(const double* d, const double* omega, const double* dtilde,
                                    const double* psi_lo, const double* d_lo,
                                    const double* psi_hi, const double* d_hi, int n, double* s,
                                    double* w);

// out = -(w .* e), n*n entries
using HadamardNegFn = void (*)(const double* w, const double* e, int n, double* out);

// gt[k*n+u] = 4 * (sum_v s[u*n+v]*mt[k*n+v] - (sum_v s[u*n+v]) * mt[k*n+u])
// i.e. the transposed form of 4*(S - diag(S*1)) * M for symmetric S.
using ApplyWeightsFn = void (*)(const double* s, const double* mt, int n, int k, double* gt);

// In-place all-pairs shortest paths, dist row-major n x n. Entries >= inf_cap
// are treated as "no edge"; relaxation keeps them large rather than overflowing.
using FloydWarshallFn = void (*)(double* dist, int n);

struct Ops {
  const char* name;
  PairwiseSqdistFn pairwise_sqdist;
  PairwiseCrossFn pairwise_cross;
  MaskedResidualFn masked_residual;
  HadamardNegFn hadamard_neg;
  ApplyWeightsFn apply_weights;
  FloydWarshallFn floyd_warshall;
};

enum class Kind { Auto, Scalar, Avx2 };

const Ops& scalar_ops();
bool cpu_has_avx2();
const Ops& avx2_ops();  // valid to call only when cpu_has_avx2()

// Auto resolves to AVX2 when the CPU supports it, scalar otherwise. The
// DGIK_KERNELS environment variable ("scalar" / "avx2") overrides Auto.
const Ops& select(Kind kind);

}  // namespace dgik::kernels
