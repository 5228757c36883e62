#include "sbrisk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbrisk {

void require_finite(const Eigen::Ref<const Vector>& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

Vector project_l1(const Eigen::Ref<const Vector>& v, double radius) {
  require_finite(v, "project_l1");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("project_l1: radius must be finite and >= 0");
  }
  if (v.lpNorm<1>() <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());

  std::vector<double> mags(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());

  // Largest k with mags[k-1] > (sum_{j<k} mags[j] - radius) / k.
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumsum += mags[k];
    const double candidate = (cumsum - radius) / static_cast<double>(k + 1);
    if (mags[k] > candidate) theta = candidate;
    else break;
  }

  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::abs(v[i]) - theta;
    out[i] = shrunk > 0.0 ? std::copysign(shrunk, v[i]) : 0.0;
  }
  return out;
}

double top_d_l2(const Eigen::Ref<const Vector>& z, std::size_t d) {
  const auto n = static_cast<std::size_t>(z.size());
  if (d < 1 || d > n) {
    throw std::out_of_range("top_d_l2: d must satisfy 1 <= d <= n");
  }
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = z[static_cast<Eigen::Index>(i)] * z[static_cast<Eigen::Index>(i)];
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(d - 1), sq.end(), std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) sum += sq[i];
  return std::sqrt(sum);
}

Vector soft_threshold(const Eigen::Ref<const Vector>& z, double lambda) {
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double shrunk = std::abs(z[i]) - lambda;
    out[i] = shrunk > 0.0 ? std::copysign(shrunk, z[i]) : 0.0;
  }
  return out;
}

std::size_t matched_sparsity(const BallIntersection& set) {
  if (set.dim == 0) throw std::invalid_argument("matched_sparsity: dim must be positive");
  if (set.l2_radius <= 0.0) return set.dim;
  const double ratio = set.l1_radius / set.l2_radius;
  // Ratios built as sqrt(d) should map back to d, not d + 1.
  const double r2 = ratio * ratio;
  const double d = std::ceil(r2 * (1.0 - 1e-12));
  if (d <= 1.0) return 1;
  if (d >= static_cast<double>(set.dim)) return set.dim;
  return static_cast<std::size_t>(d);
}

double support_l1l2(const Eigen::Ref<const Vector>& z, const BallIntersection& set) {
  if (!(set.l1_radius >= 0.0) || !(set.l2_radius >= 0.0)) {
    throw std::invalid_argument("support_l1l2: radii must be nonnegative");
  }
  if (static_cast<std::size_t>(z.size()) != set.dim) {
    throw std::invalid_argument("support_l1l2: dimension mismatch");
  }
  require_finite(z, "support_l1l2");

  const double rho = set.l1_radius;
  const double s = set.l2_radius;
  if (rho == 0.0 || s == 0.0) return 0.0;

  std::vector<double> a(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) a[i] = std::abs(z[i]);
  std::sort(a.begin(), a.end(), std::greater<>());
  if (a.front() == 0.0) return 0.0;

  // l2 constraint inactive: the maximiser is a signed vertex of rho*B_1.
  if (s >= rho) return rho * a.front();
  // l1 constraint inactive: |t|_1 <= sqrt(n) |t|_2 <= rho on the l2 ball.
  if (rho >= s * std::sqrt(static_cast<double>(a.size()))) return s * z.norm();

  const double c = rho / s;
  const std::size_t n = a.size();

  // Walk segments [a_{k+1}, a_k] with active set {1..k}. On a segment the
  // ratio |soft(z,l)|_1 / |soft(z,l)|_2 = (S1 - k l) / sqrt(S2 - 2 l S1 + k l^2)
  // decreases in l; find the first segment whose left end already reaches c.
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    s1 += a[k - 1];
    s2 += a[k - 1] * a[k - 1];
    const double left = k < n ? a[k] : 0.0;
    const double kk = static_cast<double>(k);
    const double m = s1 - kk * left;
    const double q = std::max(s2 - 2.0 * left * s1 + kk * left * left, 0.0);
    const double ratio_left = q > 0.0 ? m / std::sqrt(q) : 1.0;
    if (ratio_left < c && k < n) continue;

    if (k == n && ratio_left <= c) {
      // l1 constraint inactive at lambda = 0.
      return s * z.norm();
    }

    // Stationary point of rho*l + s*sqrt(q(l)) inside [left, a_k].
    double lambda = left;
    const double gap = kk - c * c;
    const double spread = kk * s2 - s1 * s1;
    if (gap > 0.0 && spread > 0.0) {
      lambda = s1 / kk - (c / kk) * std::sqrt(spread / gap);
    }
    lambda = std::clamp(lambda, left, a[k - 1]);
    const double q_at = std::max(s2 - 2.0 * lambda * s1 + kk * lambda * lambda, 0.0);
    return rho * lambda + s * std::sqrt(q_at);
  }
  return s * z.norm();
}

}  // namespace sbrisk
