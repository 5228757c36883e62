#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json.hpp>

#include "sbrisk/class_spec.hpp"
#include "sbrisk/geometry.hpp"
#include "sbrisk/rng.hpp"

namespace sbrisk {

/// Lower estimate of the l2 radius of the version space
/// {t in R B_1^n : X t = X t0} around t0.
struct VersionSpaceProbe {
  double radius_lb = 0.0;         // max |t - t0|_2 over the probed points
  std::size_t directions = 0;     // line probes evaluated (u and -u count separately)
  std::size_t nullspace_dim = 0;  // n - rank(X)
  Vector best_point;              // the probed point attaining radius_lb
};

[[nodiscard]] nlohmann::json to_json(const VersionSpaceProbe& probe);

struct VersionSpaceOptions {
  std::size_t probes = 1000;         // random unit directions in the null space
  std::size_t sparse_probes = 1000;  // null directions supported on rank + 1 random coordinates
  std::uint64_t seed = kDefaultSeed;
};

/// Relative singular value cut-off for the numerical rank of the design.
inline constexpr double kRankTolerance = 1e-10;

/// Orthonormal basis (n x k) of the numerical null space of `design`.
[[nodiscard]] Matrix null_space(const Eigen::Ref<const Matrix>& design);

/// Largest s >= 0 with |t0 + s u|_1 <= R, by bisection.
[[nodiscard]] double max_feasible_step(const Eigen::Ref<const Vector>& t0, const Eigen::Ref<const Vector>& u,
                                       double radius);

/// Line probes from t0 along null-space directions: random directions, the
/// projected basis vectors, and sparse null directions (the vertices of the
/// version space polytope are sparse). Both u and -u are probed. A design
/// with zero rows leaves the whole ball as the version space.
[[nodiscard]] VersionSpaceProbe version_diameter(const Eigen::Ref<const Matrix>& design, const ClassSpec& cls,
                                                 const VersionSpaceOptions& options = {});

}  // namespace sbrisk
