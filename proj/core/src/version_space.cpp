#include "sbrisk/version_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/SVD>

namespace sbrisk {

nlohmann::json to_json(const VersionSpaceProbe& probe) {
  return {{"radius_lb", probe.radius_lb},
          {"diameter_lb", 2.0 * probe.radius_lb},
          {"directions", probe.directions},
          {"nullspace_dim", probe.nullspace_dim}};
}

Matrix null_space(const Eigen::Ref<const Matrix>& design) {
  const Eigen::Index n = design.cols();
  if (design.rows() == 0) return Matrix::Identity(n, n);
  const Eigen::BDCSVD<Matrix> svd(design, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankTolerance * top) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

double max_feasible_step(const Eigen::Ref<const Vector>& t0, const Eigen::Ref<const Vector>& u, double radius) {
  const double u1 = u.lpNorm<1>();
  if (u1 == 0.0) return 0.0;
  auto feasible = [&](double s) { return (t0 + s * u).lpNorm<1>() <= radius; };
  if (!feasible(0.0)) return 0.0;
  double lo = 0.0;
  double hi = (radius + t0.lpNorm<1>()) / u1 * (1.0 + 1e-12) + 1e-300;
  while (feasible(hi)) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

VersionSpaceProbe version_diameter(const Eigen::Ref<const Matrix>& design, const ClassSpec& cls,
                                   const VersionSpaceOptions& options) {
  validate(cls);
  if (static_cast<std::size_t>(design.cols()) != cls.n) {
    throw std::invalid_argument("version_diameter: design has " + std::to_string(design.cols()) +
                                " columns, class dimension is " + std::to_string(cls.n));
  }
  if (!design.allFinite()) throw std::invalid_argument("version_diameter: design contains non-finite values");

  const auto n = static_cast<Eigen::Index>(cls.n);
  const Matrix basis = null_space(design);
  const Eigen::Index k = basis.cols();
  const Eigen::Index rank = n - k;

  VersionSpaceProbe out;
  out.nullspace_dim = static_cast<std::size_t>(k);
  out.best_point = cls.t0;
  if (k == 0 || cls.radius == 0.0) return out;

  auto probe = [&](const Vector& direction) {
    const double norm = direction.norm();
    if (!(norm > 0.0)) return;
    const Vector u = direction / norm;
    for (double sign : {1.0, -1.0}) {
      const double s = max_feasible_step(cls.t0, sign * u, cls.radius);
      ++out.directions;
      if (s > out.radius_lb) {
        out.radius_lb = s;
        out.best_point = cls.t0 + s * sign * u;
      }
    }
  };

  // Projected basis vectors.
  for (Eigen::Index i = 0; i < n; ++i) probe(basis * basis.row(i).transpose());

  Engine eng = make_engine(options.seed, StreamTag::kProbes);
  std::normal_distribution<double> normal;
  Vector coeff(k);
  for (std::size_t p = 0; p < options.probes; ++p) {
    for (Eigen::Index i = 0; i < k; ++i) coeff[i] = normal(eng);
    probe(basis * coeff);
  }

  // Sparse null directions: on rank + 1 coordinates the restricted design
  // always has a nontrivial kernel.
  const Eigen::Index m = rank + 1;
  if (m <= n) {
    std::vector<Eigen::Index> coords(static_cast<std::size_t>(n));
    std::iota(coords.begin(), coords.end(), Eigen::Index{0});
    Matrix sub(design.rows(), m);
    for (std::size_t p = 0; p < options.sparse_probes; ++p) {
      std::shuffle(coords.begin(), coords.end(), eng);
      for (Eigen::Index c = 0; c < m; ++c) sub.col(c) = design.col(coords[static_cast<std::size_t>(c)]);
      Vector v;
      if (design.rows() == 0) {
        v = Vector::Unit(m, 0);
      } else {
        const Eigen::BDCSVD<Matrix> svd(sub, Eigen::ComputeFullV);
        v = svd.matrixV().col(m - 1);
      }
      Vector u = Vector::Zero(n);
      for (Eigen::Index c = 0; c < m; ++c) u[coords[static_cast<std::size_t>(c)]] = v[c];
      probe(u);
    }
  }
  return out;
}

}  // namespace sbrisk
