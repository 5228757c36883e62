#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sbrisk::oracle {

namespace {

double normal_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

void scan_grid(const Vector& v, double radius, const Vector& centre, double half_width, double step, Vector& best,
               double& best_dist) {
  const auto n = v.size();
  const auto points = static_cast<long>(std::floor(2.0 * half_width / step + 0.5)) + 1;
  Vector u(n);
  std::function<void(Eigen::Index)> rec = [&](Eigen::Index k) {
    if (k == n) {
      if (u.lpNorm<1>() > radius * (1.0 + 1e-12)) return;
      const double d = (u - v).norm();
      if (d < best_dist) {
        best_dist = d;
        best = u;
      }
      return;
    }
    for (long i = 0; i < points; ++i) {
      u[k] = centre[k] - half_width + static_cast<double>(i) * step;
      rec(k + 1);
    }
  };
  rec(0);
}

}  // namespace

Vector grid_project_l1(const Vector& v, double radius, double resolution) {
  if (v.size() < 2 || v.size() > 3) throw std::invalid_argument("grid oracle supports n = 2 or 3");
  Vector best = Vector::Zero(v.size());
  double best_dist = std::numeric_limits<double>::infinity();
  // Coarse pass over the whole box, then the target resolution near the
  // coarse winner.
  const double coarse = 20.0 * resolution;
  scan_grid(v, radius, Vector::Zero(v.size()), radius, coarse, best, best_dist);
  const Vector centre = best;
  scan_grid(v, radius, centre, 2.0 * coarse, resolution, best, best_dist);
  return best;
}

double sorted_top_d(const Vector& z, std::size_t d) {
  std::vector<double> a(z.data(), z.data() + z.size());
  for (double& x : a) x = std::abs(x);
  std::sort(a.begin(), a.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

Vector project_intersection(const Vector& v, double l1_radius, double l2_radius) {
  auto candidate = [&](double theta) {
    Vector u(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = std::copysign(std::max(std::abs(v[i]) - theta, 0.0), v[i]);
    const double norm = u.norm();
    return norm > l2_radius ? Vector(u * (l2_radius / norm)) : u;
  };
  Vector t = candidate(0.0);
  if (t.lpNorm<1>() <= l1_radius) return t;
  double lo = 0.0;
  double hi = v.cwiseAbs().maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (candidate(mid).lpNorm<1>() > l1_radius ? lo : hi) = mid;
  }
  return candidate(hi);
}

double ascent_support(const Vector& z, double l1_radius, double l2_radius) {
  if (z.norm() == 0.0 || l1_radius == 0.0 || l2_radius == 0.0) return 0.0;
  // Projected gradient ascent on <z, t>. A fixed point of t -> P(t + eta z)
  // is a maximiser for any eta > 0; the steps grow to speed up the approach
  // and stop growing while the threshold still resolves O(1) entries.
  const Vector dir = z / z.norm();
  Vector t = Vector::Zero(z.size());
  double eta = l2_radius;
  for (int it = 0; it < 5000; ++it) {
    const Vector next = project_intersection(t + eta * dir, l1_radius, l2_radius);
    const double moved = (next - t).norm();
    t = next;
    if (moved == 0.0) break;
    if (eta < 1e4 * l2_radius) eta *= 1.5;
  }
  return z.dot(t);
}

double boundary_support_2d(const Vector& z, double l1_radius, double l2_radius, std::size_t points) {
  std::vector<double> angles;
  for (std::size_t k = 0; k < points; ++k) angles.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / points);
  // Where the circle meets the diamond: |cos| + |sin| = l1 / l2.
  const double ratio = l1_radius / l2_radius;
  if (ratio > 1.0 && ratio < std::numbers::sqrt2) {
    const double phi = std::asin(ratio / std::numbers::sqrt2) - std::numbers::pi / 4.0;
    for (int quadrant = 0; quadrant < 4; ++quadrant) {
      const double base = quadrant * std::numbers::pi / 2.0;
      angles.push_back(base + phi);
      angles.push_back(base + std::numbers::pi / 2.0 - phi);
    }
  }
  double best = 0.0;
  for (double a : angles) {
    const double c = std::cos(a);
    const double s = std::sin(a);
    const double rho = std::min(l2_radius, l1_radius / (std::abs(c) + std::abs(s)));
    best = std::max(best, std::abs(rho * (z[0] * c + z[1] * s)));
  }
  return best;
}

double enumerate_sign_mean(const std::vector<double>& x) {
  const std::size_t N = x.size();
  double total = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << N); ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += ((mask >> i) & 1U) != 0 ? x[i] : -x[i];
    total += std::abs(s);
  }
  return total / static_cast<double>(std::size_t{1} << N) / std::sqrt(static_cast<double>(N));
}

double angular_version_radius(const Vector& a, double radius, std::size_t points) {
  // Gram-Schmidt on e1, e2, e3 against a.
  const Vector an = a / a.norm();
  std::vector<Vector> basis;
  for (int i = 0; i < 3 && basis.size() < 2; ++i) {
    Vector e = Vector::Unit(3, i);
    e -= an.dot(e) * an;
    for (const auto& b : basis) e -= b.dot(e) * b;
    if (e.norm() > 1e-6) basis.push_back(e / e.norm());
  }
  double best = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double th = std::numbers::pi * static_cast<double>(k) / points;
    const Vector u = std::cos(th) * basis[0] + std::sin(th) * basis[1];
    best = std::max(best, radius / u.lpNorm<1>());
  }
  return best;
}

double gaussian_l21() {
  const std::size_t m = 2'000'000;
  const double hi = 40.0;
  const double h = hi / m;
  auto f = [](double t) { return std::sqrt(2.0 * normal_tail(t)); };
  double s = f(0.0) + f(hi);
  for (std::size_t k = 1; k < m; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * f(h * static_cast<double>(k));
  return s * h / 3.0;
}

double gaussian_psi2() {
  double lo = std::sqrt(2.0) * (1.0 + 1e-12);
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (lo + hi);
    const double e = 1.0 / std::sqrt(1.0 - 2.0 / (c * c));
    (e > 2.0 ? lo : hi) = c;
  }
  return 0.5 * (lo + hi);
}

double student_t_fourth_moment(double p) {
  // E T^4 = 3 p^2 / ((p - 2)(p - 4)); the variance p / (p - 2) is scaled to 1.
  const double raw = 3.0 * p * p / ((p - 2.0) * (p - 4.0));
  const double var = p / (p - 2.0);
  return raw / (var * var);
}

double gaussian_tau_argmax(double lo, double hi) {
  double best_tau = lo;
  double best = -1.0;
  const int steps = 1'000'000;
  for (int k = 0; k <= steps; ++k) {
    const double tau = lo + (hi - lo) * k / steps;
    const double v = tau * tau * 2.0 * normal_tail(2.0 * tau);
    if (v > best) {
      best = v;
      best_tau = tau;
    }
  }
  return best_tau;
}

double gaussian_two_sided_tail(double u) { return 2.0 * normal_tail(u); }

}  // namespace sbrisk::oracle
