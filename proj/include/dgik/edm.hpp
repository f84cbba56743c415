#pragma once

// Conversions among point sets, Gram matrices and Euclidean distance
// matrices, plus anchor-based alignment of recovered realizations.
//
// Distance matrices hold SQUARED distances throughout.

#include <vector>

#include "dgik/types.hpp"

namespace dgik {

struct AnchorSet {
  std::vector<int> indices;  // rows of the realization that are anchored
  Matrix targets;            // |indices| x K target coordinates
};

// X = P * P^T
Matrix gram_from_points(const Matrix& p);

// D = diag(X) 1^T + 1 diag(X)^T - 2X. Output is bit-exactly symmetric with a
// zero diagonal.
Matrix edm_from_gram(const Matrix& x);

// Double centering: X = -1/2 J D J with J = I - (1/N) 1 1^T. Row sums of the
// result vanish. Inputs that are not valid EDMs yield an indefinite X; the
// clamping happens downstream in points_from_gram.
Matrix gram_from_edm(const Matrix& d);

// Best rank-k PSD factor: eigenvalues sorted descending, negatives clamped to
// zero, columns zero-padded when fewer than k eigenvalues are positive.
Matrix points_from_gram(const Matrix& x, int k);

// Rigid alignment over O(K): finds the orthogonal R and translation t that
// best map the anchor rows of p onto their targets (least squares), and
// applies the transform to every row. Throws DegenerateAnchors when the
// centered anchor sources or targets do not span R^K.
Matrix procrustes_align(const Matrix& p, const AnchorSet& anchors);

}  // namespace dgik
