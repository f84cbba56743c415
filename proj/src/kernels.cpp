#include "dgik/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace dgik::kernels {

namespace {

Kind env_override() {
  const char* env = std::getenv("DGIK_KERNELS");
  if (env == nullptr) return Kind::Auto;
  if (std::strcmp(env, "scalar") == 0) return Kind::Scalar;
  if (std::strcmp(env, "avx2") == 0) return Kind::Avx2;
  return Kind::Auto;
}

}  // namespace

const Ops& select(Kind kind) {
  if (kind == Kind::Auto) kind = env_override();
  switch (kind) {
    case Kind::Scalar:
      return scalar_ops();
    case Kind::Avx2:
      return cpu_has_avx2() ? avx2_ops() : scalar_ops();
    case Kind::Auto:
    default:
      return cpu_has_avx2() ? avx2_ops() : scalar_ops();
  }
}

}  // namespace dgik::kernels
