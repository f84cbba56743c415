#pragma once

// Informed initialization by bound smoothing: triangle-inequality upper and
// lower bounds on every vertex pair via all-pairs shortest paths on a doubled
// graph, pre-EDM sampling within the bounds, and rank-K projection to an
// initial realization.
//
// Bounds matrices hold PLAIN distances (the triangle inequality is a metric
// property); squaring happens when sampling.

#include <cstdint>

#include "dgik/kernels.hpp"
#include "dgik/robot.hpp"
#include "dgik/types.hpp"

namespace dgik {

struct BoundsMatrix {
  Matrix lower, upper;  // plain distances, symmetric, zero diagonals
};

// Doubled-graph shortest paths: within-copy edges carry upper bounds,
// cross-copy edges carry negated lower bounds. Throws DisconnectedGraph when
// some pair has no finite upper bound and NegativeCycle when the constraint
// set is inconsistent (lower exceeding upper).
BoundsMatrix smooth_bounds(const DistanceGraph& graph,
                           kernels::Kind kind = kernels::Kind::Auto);

// Independent uniform sample of each pairwise distance within its bounds,
// returned squared with zero diagonal. Deterministic given the seed.
Matrix sample_pre_edm(const BoundsMatrix& bounds, std::uint64_t seed);

// Rank-K projection of a (generally invalid) pre-EDM to a point set.
Matrix initial_points(const Matrix& pre_edm, int k);

}  // namespace dgik
