#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace sbrisk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative slack used whenever a computed norm is compared against a radius.
inline constexpr double kRadiusSlack = 1e-12;

/// The set l1_radius * B_1^n intersected with l2_radius * B_2^n.
struct BallIntersection {
  double l1_radius = 0.0;
  double l2_radius = 0.0;
  std::size_t dim = 0;
};

/// Throws std::invalid_argument if any entry of `v` is NaN or infinite.
void require_finite(const Eigen::Ref<const Vector>& v, const char* what);

/// Euclidean projection of `v` onto the l1 ball of radius `radius`.
///
/// Sort-based threshold algorithm, O(n log n). A vector that is already
/// feasible is returned unchanged (bit-for-bit).
[[nodiscard]] Vector project_l1(const Eigen::Ref<const Vector>& v, double radius);

/// l2 norm of the `d` largest-magnitude entries of `z`, 1 <= d <= n.
[[nodiscard]] double top_d_l2(const Eigen::Ref<const Vector>& z, std::size_t d);

/// Exact support function sup{<z,t> : |t|_1 <= rho, |t|_2 <= s}.
///
/// Uses the dual form min_{lambda >= 0} rho*lambda + s*|soft(z, lambda)|_2.
/// The dual objective is convex and piecewise smooth between the breakpoints
/// {0} u {|z_i|}; the scan locates the segment on which the l1/l2 ratio of
/// soft(z, lambda) crosses rho/s and solves the stationarity condition there
/// in closed form.
[[nodiscard]] double support_l1l2(const Eigen::Ref<const Vector>& z, const BallIntersection& set);

/// The sparsity level matched to a ball intersection: clamp(ceil((rho/s)^2), 1, n).
[[nodiscard]] std::size_t matched_sparsity(const BallIntersection& set);

/// Soft thresholding, sign(z_i) * max(|z_i| - lambda, 0).
[[nodiscard]] Vector soft_threshold(const Eigen::Ref<const Vector>& z, double lambda);

}  // namespace sbrisk
