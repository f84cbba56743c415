#include "dgik/bounds.hpp"

#include <cmath>
#include <random>

#include "dgik/edm.hpp"

namespace dgik {

namespace {
constexpr double kInf = 1e100;
constexpr double kUnreachable = 1e50;
}  // namespace

BoundsMatrix smooth_bounds(const DistanceGraph& graph, kernels::Kind kind) {
  const int n = graph.ordering.n();
  const auto& ops = kernels::select(kind);

  // Per-pair plain-distance bounds from the declared edges.
  Matrix upper_in = Matrix::Constant(n, n, kInf);
  Matrix lower_in = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) upper_in(i, i) = 0.0;
  for (const auto& [key, sq_dist] : graph.equality) {
    const double d = std::sqrt(sq_dist);
    upper_in(key.first, key.second) = upper_in(key.second, key.first) = d;
    lower_in(key.first, key.second) = lower_in(key.second, key.first) = d;
  }
  for (const auto& [key, iv] : graph.intervals) {
    if (iv.upper) {
      const double d = std::sqrt(*iv.upper);
      upper_in(key.first, key.second) = upper_in(key.second, key.first) = d;
    }
    if (iv.lower) {
      const double d = std::sqrt(*iv.lower);
      lower_in(key.first, key.second) = lower_in(key.second, key.first) = d;
    }
  }

  // Two copies of the graph. Crossing from the first copy to the second costs
  // the negated lower bound, so a short path to the far copy witnesses a large
  // lower bound; crossing is one-way, otherwise every edge would close a
  // negative cycle with its own mirror.
  const int m = 2 * n;
  Matrix dist(m, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      dist(i, j) = upper_in(i, j);
      dist(n + i, n + j) = upper_in(i, j);
      dist(i, n + j) = -lower_in(i, j);
      dist(n + i, j) = kInf;
    }
  }
  ops.floyd_warshall(dist.data(), m);

  BoundsMatrix out;
  out.upper.resize(n, n);
  out.lower.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (dist(i, i) < -1e-9) throw NegativeCycle("smooth_bounds: inconsistent constraints");
    for (int j = 0; j < n; ++j) {
      const double up = dist(i, j);
      if (up >= kUnreachable)
        throw DisconnectedGraph("smooth_bounds: vertex pair with unbounded distance");
      const double lo = std::max(0.0, -dist(i, n + j));
      if (lo > up + 1e-9) throw NegativeCycle("smooth_bounds: lower bound exceeds upper bound");
      out.upper(i, j) = up;
      out.lower(i, j) = std::min(lo, up);
    }
    out.upper(i, i) = 0.0;
    out.lower(i, i) = 0.0;
  }
  return out;
}

Matrix sample_pre_edm(const BoundsMatrix& bounds, std::uint64_t seed) {
  const long n = bounds.lower.rows();
  require_same_shape(bounds.lower, bounds.upper, "sample_pre_edm");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix pre = Matrix::Zero(n, n);
  for (long u = 0; u < n; ++u) {
    for (long v = u + 1; v < n; ++v) {
      const double lo = bounds.lower(u, v);
      const double hi = bounds.upper(u, v);
      const double d = lo + (hi - lo) * unit(rng);
      pre(u, v) = pre(v, u) = d * d;
    }
  }
  return pre;
}

Matrix initial_points(const Matrix& pre_edm, int k) {
  return points_from_gram(gram_from_edm(pre_edm), k);
}

}  // namespace dgik
