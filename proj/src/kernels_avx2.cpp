#include "dgik/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

// Each function carries its own target attribute so this file builds without
// global -mavx2; dispatch guarantees these run only on capable CPUs.
#define DGIK_AVX2 __attribute__((target("avx2,fma")))

namespace dgik::kernels {
namespace {

DGIK_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

DGIK_AVX2 void pairwise_sqdist_avx2(const double* pt, int n, int k, double* d) {
  for (int u = 0; u < n; ++u) {
    double* drow = d + static_cast<long>(u) * n;
    for (int c = 0; c < k; ++c) {
      const double* axis = pt + static_cast<long>(c) * n;
      const __m256d pu = _mm256_set1_pd(axis[u]);
      int v = 0;
      if (c == 0) {
        for (; v + 4 <= n; v += 4) {
          const __m256d diff = _mm256_sub_pd(pu, _mm256_loadu_pd(axis + v));
          _mm256_storeu_pd(drow + v, _mm256_mul_pd(diff, diff));
        }
        for (; v < n; ++v) {
          const double diff = axis[u] - axis[v];
          drow[v] = diff * diff;
        }
      } else {
        for (; v + 4 <= n; v += 4) {
          const __m256d diff = _mm256_sub_pd(pu, _mm256_loadu_pd(axis + v));
          const __m256d acc = _mm256_fmadd_pd(diff, diff, _mm256_loadu_pd(drow + v));
          _mm256_storeu_pd(drow + v, acc);
        }
        for (; v < n; ++v) {
          const double diff = axis[u] - axis[v];
          drow[v] += diff * diff;
        }
      }
    }
  }
}

DGIK_AVX2 void pairwise_cross_avx2(const double* pt, const double* zt, int n, int k, double* e) {
  const __m256d two = _mm256_set1_pd(2.0);
  for (int u = 0; u < n; ++u) {
    double* erow = e + static_cast<long>(u) * n;
    for (int c = 0; c < k; ++c) {
      const double* paxis = pt + static_cast<long>(c) * n;
      const double* zaxis = zt + static_cast<long>(c) * n;
      const __m256d pu = _mm256_set1_pd(paxis[u]);
      const __m256d zu = _mm256_set1_pd(zaxis[u]);
      int v = 0;
      if (c == 0) {
        for (; v + 4 <= n; v += 4) {
          const __m256d dp = _mm256_sub_pd(pu, _mm256_loadu_pd(paxis + v));
          const __m256d dz = _mm256_sub_pd(zu, _mm256_loadu_pd(zaxis + v));
          _mm256_storeu_pd(erow + v, _mm256_mul_pd(two, _mm256_mul_pd(dp, dz)));
        }
        for (; v < n; ++v) erow[v] = 2.0 * (paxis[u] - paxis[v]) * (zaxis[u] - zaxis[v]);
      } else {
        for (; v + 4 <= n; v += 4) {
          const __m256d dp = _mm256_sub_pd(pu, _mm256_loadu_pd(paxis + v));
          const __m256d dz = _mm256_sub_pd(zu, _mm256_loadu_pd(zaxis + v));
          const __m256d acc =
              _mm256_fmadd_pd(_mm256_mul_pd(two, dp), dz, _mm256_loadu_pd(erow + v));
          _mm256_storeu_pd(erow + v, acc);
        }
        for (; v < n; ++v) erow[v] += 2.0 * (paxis[u] - paxis[v]) * (zaxis[u] - zaxis[v]);
      }
    }
  }
}

DGIK_AVX2 double masked_residual_avx2(const double* d, const double* omega, const double* dtilde,
                                      const double* psi_lo, const double* d_lo,
                                      const double* psi_hi, const double* d_hi, int n, double* s,
                                      double* w) {
  const long nn = static_cast<long>(n) * n;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d cost_acc = zero;
  long i = 0;
  for (; i + 4 <= nn; i += 4) {
    const __m256d dv = _mm256_loadu_pd(d + i);
    const __m256d eq =
        _mm256_mul_pd(_mm256_loadu_pd(omega + i), _mm256_sub_pd(_mm256_loadu_pd(dtilde + i), dv));
    const __m256d lo =
        _mm256_mul_pd(_mm256_loadu_pd(psi_lo + i), _mm256_sub_pd(_mm256_loadu_pd(d_lo + i), dv));
    const __m256d hi =
        _mm256_mul_pd(_mm256_loadu_pd(psi_hi + i), _mm256_sub_pd(dv, _mm256_loadu_pd(d_hi + i)));
    const __m256d lo_act = _mm256_and_pd(_mm256_cmp_pd(lo, zero, _CMP_GT_OQ), one);
    const __m256d hi_act = _mm256_and_pd(_mm256_cmp_pd(hi, zero, _CMP_GT_OQ), one);
    const __m256d rlo = _mm256_max_pd(lo, zero);
    const __m256d rhi = _mm256_max_pd(hi, zero);
    _mm256_storeu_pd(s + i, _mm256_sub_pd(_mm256_add_pd(eq, rlo), rhi));
    _mm256_storeu_pd(
        w + i, _mm256_add_pd(_mm256_loadu_pd(omega + i), _mm256_add_pd(lo_act, hi_act)));
    cost_acc = _mm256_fmadd_pd(eq, eq, cost_acc);
    cost_acc = _mm256_fmadd_pd(rlo, rlo, cost_acc);
    cost_acc = _mm256_fmadd_pd(rhi, rhi, cost_acc);
  }
  double cost = hsum(cost_acc);
  for (; i < nn; ++i) {
    const double eq = omega[i] * (dtilde[i] - d[i]);
    const double lo = psi_lo[i] * (d_lo[i] - d[i]);
    const double hi = psi_hi[i] * (d[i] - d_hi[i]);
    const double lo_act = lo > 0.0 ? 1.0 : 0.0;
    const double hi_act = hi > 0.0 ? 1.0 : 0.0;
    const double rlo = lo_act * lo;
    const double rhi = hi_act * hi;
    s[i] = eq + rlo - rhi;
    w[i] = omega[i] + lo_act + hi_act;
    cost += eq * eq + rlo * rlo + rhi * rhi;
  }
  return 0.5 * cost;
}

DGIK_AVX2 void hadamard_neg_avx2(const double* w, const double* e, int n, double* out) {
  const long nn = static_cast<long>(n) * n;
  const __m256d neg = _mm256_set1_pd(-0.0);
  long i = 0;
  for (; i + 4 <= nn; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(e + i));
    _mm256_storeu_pd(out + i, _mm256_xor_pd(prod, neg));
  }
  for (; i < nn; ++i) out[i] = -w[i] * e[i];
}

DGIK_AVX2 void apply_weights_avx2(const double* s, const double* mt, int n, int k, double* gt) {
  for (int u = 0; u < n; ++u) {
    const double* srow = s + static_cast<long>(u) * n;
    __m256d sum_acc = _mm256_setzero_pd();
    int v = 0;
    for (; v + 4 <= n; v += 4) sum_acc = _mm256_add_pd(sum_acc, _mm256_loadu_pd(srow + v));
    double rowsum = hsum(sum_acc);
    for (; v < n; ++v) rowsum += srow[v];
    for (int c = 0; c < k; ++c) {
      const double* maxis = mt + static_cast<long>(c) * n;
      __m256d dot_acc = _mm256_setzero_pd();
      int j = 0;
      for (; j + 4 <= n; j += 4)
        dot_acc = _mm256_fmadd_pd(_mm256_loadu_pd(srow + j), _mm256_loadu_pd(maxis + j), dot_acc);
      double acc = hsum(dot_acc);
      for (; j < n; ++j) acc += srow[j] * maxis[j];
      gt[static_cast<long>(c) * n + u] = 4.0 * (acc - rowsum * maxis[u]);
    }
  }
}

DGIK_AVX2 void floyd_warshall_avx2(double* dist, int n) {
  for (int k = 0; k < n; ++k) {
    const double* krow = dist + static_cast<long>(k) * n;
    for (int i = 0; i < n; ++i) {
      double* irow = dist + static_cast<long>(i) * n;
      const double dik_s = irow[k];
      const __m256d dik = _mm256_set1_pd(dik_s);
      int j = 0;
      for (; j + 4 <= n; j += 4) {
        const __m256d via = _mm256_add_pd(dik, _mm256_loadu_pd(krow + j));
        _mm256_storeu_pd(irow + j, _mm256_min_pd(via, _mm256_loadu_pd(irow + j)));
      }
      for (; j < n; ++j) {
        const double via = dik_s + krow[j];
        if (via < irow[j]) irow[j] = via;
      }
    }
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops = {
      "avx2",          pairwise_sqdist_avx2, pairwise_cross_avx2, masked_residual_avx2,
      hadamard_neg_avx2, apply_weights_avx2,   floyd_warshall_avx2,
  };
  return ops;
}

bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace dgik::kernels

#else  // non-x86: scalar only

namespace dgik::kernels {

const Ops& avx2_ops() { return scalar_ops(); }
bool cpu_has_avx2() { return false; }

}  // namespace dgik::kernels

#endif
