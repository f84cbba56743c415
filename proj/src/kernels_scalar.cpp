#include "dgik/kernels.hpp"

namespace dgik::kernels {
namespace {

void pairwise_sqdist_scalar(const double* pt, int n, int k, double* d) {
  for (int u = 0; u < n; ++u) {
    double* drow = d + static_cast<long>(u) * n;
    for (int v = 0; v < n; ++v) drow[v] = 0.0;
    for (int c = 0; c < k; ++c) {
      const double* axis = pt + static_cast<long>(c) * n;
      const double pu = axis[u];
      for (int v = 0; v < n; ++v) {
        const double diff = pu - axis[v];
        drow[v] += diff * diff;
      }
    }
  }
}

void pairwise_cross_scalar(const double* pt, const double* zt, int n, int k, double* e) {
  for (int u = 0; u < n; ++u) {
    double* erow = e + static_cast<long>(u) * n;
    for (int v = 0; v < n; ++v) erow[v] = 0.0;
    for (int c = 0; c < k; ++c) {
      const double* paxis = pt + static_cast<long>(c) * n;
      const double* zaxis = zt + static_cast<long>(c) * n;
      const double pu = paxis[u];
      const double zu = zaxis[u];
      for (int v = 0; v < n; ++v) {
        erow[v] += 2.0 * (pu - paxis[v]) * (zu - zaxis[v]);
      }
    }
  }
}

double masked_residual_scalar(const double* d, const double* omega, const double* dtilde,
                              const double* psi_lo, const double* d_lo, const double* psi_hi,
                              const double* d_hi, int n, double* s, double* w) {
  double cost = 0.0;
  const long nn = static_cast<long>(n) * n;
  for (long i = 0; i < nn; ++i) {
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

void hadamard_neg_scalar(const double* w, const double* e, int n, double* out) {
  const long nn = static_cast<long>(n) * n;
  for (long i = 0; i < nn; ++i) out[i] = -w[i] * e[i];
}

void apply_weights_scalar(const double* s, const double* mt, int n, int k, double* gt) {
  for (int u = 0; u < n; ++u) {
    const double* srow = s + static_cast<long>(u) * n;
    double rowsum = 0.0;
    for (int v = 0; v < n; ++v) rowsum += srow[v];
    for (int c = 0; c < k; ++c) {
      const double* maxis = mt + static_cast<long>(c) * n;
      double acc = 0.0;
      for (int v = 0; v < n; ++v) acc += srow[v] * maxis[v];
      gt[static_cast<long>(c) * n + u] = 4.0 * (acc - rowsum * maxis[u]);
    }
  }
}

void floyd_warshall_scalar(double* dist, int n) {
  for (int k = 0; k < n; ++k) {
    const double* krow = dist + static_cast<long>(k) * n;
    for (int i = 0; i < n; ++i) {
      double* irow = dist + static_cast<long>(i) * n;
      const double dik = irow[k];
      for (int j = 0; j < n; ++j) {
        const double via = dik + krow[j];
        if (via < irow[j]) irow[j] = via;
      }
    }
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",          pairwise_sqdist_scalar, pairwise_cross_scalar, masked_residual_scalar,
      hadamard_neg_scalar, apply_weights_scalar,   floyd_warshall_scalar,
  };
  return ops;
}

}  // namespace dgik::kernels
