#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dgik {

// Row-major everywhere: a point set is an N x K matrix whose rows (the
// points) are contiguous in memory, which is what the compute kernels want.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct DegenerateAnchors : Error {
  using Error::Error;
};
struct RankDeficientBase : Error {
  using Error::Error;
};
struct DegenerateModelDecrease : Error {
  using Error::Error;
};
struct DegenerateGeometry : Error {
  using Error::Error;
};
struct DegenerateDirectionGoal : Error {
  using Error::Error;
};
struct MalformedGraph : Error {
  using Error::Error;
};
struct DisconnectedGraph : Error {
  using Error::Error;
};
struct NegativeCycle : Error {
  using Error::Error;
};
struct InvalidCounts : Error {
  using Error::Error;
};
struct InvalidModel : Error {
  using Error::Error;
};

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatch(std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
}

}  // namespace dgik
