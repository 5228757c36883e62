#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sbrisk/distributions.hpp"
#include "sbrisk/version_space.hpp"

namespace sbrisk {
namespace {

TEST(NullSpace, DimensionAndOrthogonality) {
  const Matrix x = sample_design(DesignSpec::gaussian(6), 4, 1);
  const Matrix basis = null_space(x);
  ASSERT_EQ(basis.rows(), 6);
  ASSERT_EQ(basis.cols(), 2);
  EXPECT_LE((x * basis).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((basis.transpose() * basis - Matrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_EQ(null_space(Matrix(0, 3)).cols(), 3);
}

TEST(MaxStep, ClosedForm) {
  Vector t0 = Vector::Zero(3);
  Vector u(3);
  u << 0.6, -0.8, 0.0;
  EXPECT_NEAR(max_feasible_step(t0, u, 1.4), 1.0, 1e-12);
}

TEST(VersionSpace, FullRankCollapses) {
  const Matrix x = sample_design(DesignSpec::gaussian(5), 12, 2);
  const VersionSpaceProbe p = version_diameter(x, ClassSpec::centred(5, 1.0));
  EXPECT_EQ(p.nullspace_dim, 0U);
  EXPECT_EQ(p.radius_lb, 0.0);
}

TEST(VersionSpace, NoRowsGivesWholeBall) {
  const VersionSpaceProbe p = version_diameter(Matrix(0, 7), ClassSpec::centred(7, 1.3));
  EXPECT_NEAR(p.radius_lb, 1.3, 1e-12);
  EXPECT_EQ(p.nullspace_dim, 7U);
}

TEST(VersionSpace, MatchesAngularGrid) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix x = sample_design(DesignSpec::gaussian(3), 1, seed);
    const VersionSpaceProbe p = version_diameter(x, ClassSpec::centred(3, 1.0));
    const double expected = oracle::angular_version_radius(x.row(0).transpose(), 1.0, 200000);
    EXPECT_NEAR(p.radius_lb, expected, 1e-3) << seed;
  }
}

TEST(VersionSpaceProperty, NonIncreasingInNestedSamples) {
  ClassSpec cls{20, 1.0, Vector::Zero(20)};
  cls.t0[3] = 0.4;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix full = sample_design(DesignSpec::rademacher(20), 20, seed);
    double prev = std::numeric_limits<double>::infinity();
    for (Eigen::Index rows : {0, 2, 5, 10, 15, 19, 20}) {
      VersionSpaceOptions opts;
      opts.seed = seed;
      const double r = version_diameter(full.topRows(rows), cls, opts).radius_lb;
      // Probe sets differ between null spaces, so allow a small slack.
      EXPECT_LE(r, prev * (1.0 + 1e-2) + 1e-12) << seed << " rows=" << rows;
      prev = std::min(prev, r);
    }
  }
}

TEST(VersionSpaceProperty, BestPointIsFeasible) {
  std::mt19937_64 eng(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 4 + seed % 20;
    const std::size_t N = 1 + seed % n;
    ClassSpec cls = ClassSpec::centred(n, 1.0);
    cls.t0[0] = 0.3;
    cls.t0[static_cast<Eigen::Index>(n - 1)] = -0.2;
    const Matrix x = sample_design(seed % 2 == 0 ? DesignSpec::gaussian(n) : DesignSpec::rademacher(n), N, seed);
    VersionSpaceOptions opts;
    opts.seed = seed;
    const VersionSpaceProbe p = version_diameter(x, cls, opts);
    ASSERT_EQ(p.best_point.size(), static_cast<Eigen::Index>(n));
    EXPECT_LE(p.best_point.lpNorm<1>(), cls.radius * (1.0 + 1e-10));
    const Matrix xm = x;
    EXPECT_LE((xm * (p.best_point - cls.t0)).cwiseAbs().maxCoeff(), 1e-8 * xm.norm());
    EXPECT_NEAR((p.best_point - cls.t0).norm(), p.radius_lb, 1e-12);
  }
}

TEST(VersionSpaceJson, IncludesDiameter) {
  VersionSpaceProbe p;
  p.radius_lb = 0.25;
  EXPECT_EQ(to_json(p).at("diameter_lb"), 0.5);
}

}  // namespace
}  // namespace sbrisk
