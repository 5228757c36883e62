#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sbrisk/geometry.hpp"

namespace sbrisk {
namespace {

Vector normal_vector(std::mt19937_64& eng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vector v(n);
  for (auto& x : v) x = g(eng);
  return v;
}

TEST(ProjectL1, FeasibleInputIsReturnedUnchanged) {
  Vector v(2);
  v << 0.3, -0.2;
  const Vector p = project_l1(v, 1.0);
  EXPECT_EQ(p[0], 0.3);
  EXPECT_EQ(p[1], -0.2);
}

TEST(ProjectL1, ProjectsOntoVertex) {
  Vector v(2);
  v << 3.0, 0.0;
  const Vector p = project_l1(v, 1.0);
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
}

TEST(ProjectL1, MatchesGridSearch) {
  Vector v(3);
  v << 2.0, 1.0, 0.0;
  const Vector expected = oracle::grid_project_l1(v, 1.0, 1e-3);
  EXPECT_LE((project_l1(v, 1.0) - expected).norm(), 2e-3);

  std::mt19937_64 eng(11);
  for (int k = 0; k < 5; ++k) {
    const Vector w = normal_vector(eng, 2, 2.0);
    EXPECT_LE((project_l1(w, 0.7) - oracle::grid_project_l1(w, 0.7, 1e-3)).norm(), 2e-3);
  }
}

TEST(ProjectL1, RadiusZeroGivesOrigin) {
  Vector v(3);
  v << 1.0, -2.0, 3.0;
  EXPECT_EQ(project_l1(v, 0.0), Vector::Zero(3));
}

TEST(ProjectL1, RejectsBadInput) {
  Vector v(2);
  v << 1.0, std::nan("");
  EXPECT_THROW((void)project_l1(v, 1.0), std::invalid_argument);
  EXPECT_THROW((void)project_l1(Vector::Ones(2), -1.0), std::invalid_argument);
}

TEST(ProjectL1Property, IdempotentNonExpansiveFeasible) {
  std::mt19937_64 eng(2024);
  std::uniform_real_distribution<double> radius(0.01, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(eng() % 40);
    const double R = radius(eng);
    const Vector u = normal_vector(eng, n, 2.0);
    const Vector v = normal_vector(eng, n, 2.0);
    const Vector pu = project_l1(u, R);
    const Vector pv = project_l1(v, R);
    ASSERT_LE(pu.lpNorm<1>(), R * (1.0 + 1e-12));
    ASSERT_LE((pu - pv).norm(), (u - v).norm() * (1.0 + 1e-12));
    ASSERT_LE((project_l1(pu, R) - pu).norm(), 1e-12 * (1.0 + R));
  }
}

TEST(TopD, ClosedFormCases) {
  Vector z(3);
  z << 1.0, -2.0, 0.5;
  EXPECT_DOUBLE_EQ(top_d_l2(z, 1), 2.0);
  EXPECT_DOUBLE_EQ(top_d_l2(z, 3), std::sqrt(5.25));
  EXPECT_THROW((void)top_d_l2(z, 0), std::out_of_range);
  EXPECT_THROW((void)top_d_l2(z, 4), std::out_of_range);
}

TEST(TopD, MatchesFullSort) {
  std::mt19937_64 eng(7);
  const Vector z = normal_vector(eng, 100);
  EXPECT_NEAR(top_d_l2(z, 10), oracle::sorted_top_d(z, 10), 1e-12);
}

TEST(MatchedSparsity, CeilAndClamp) {
  EXPECT_EQ(matched_sparsity({1.0, 1.0, 10}), 1U);
  EXPECT_EQ(matched_sparsity({2.0, 1.0, 10}), 4U);
  EXPECT_EQ(matched_sparsity({1.5, 1.0, 10}), 3U);
  EXPECT_EQ(matched_sparsity({10.0, 1.0, 10}), 10U);
  EXPECT_EQ(matched_sparsity({0.1, 1.0, 10}), 1U);
}

TEST(Support, TrivialBranchesAreExact) {
  std::mt19937_64 eng(3);
  const Vector z = normal_vector(eng, 20);
  // l2 inactive
  EXPECT_EQ(support_l1l2(z, {0.5, 0.7, 20}), 0.5 * z.cwiseAbs().maxCoeff());
  // l1 inactive
  EXPECT_EQ(support_l1l2(z, {0.5 * std::sqrt(20.0), 0.5, 20}), 0.5 * z.norm());
  EXPECT_EQ(support_l1l2(z, {0.0, 1.0, 20}), 0.0);
  EXPECT_EQ(support_l1l2(z, {1.0, 0.0, 20}), 0.0);
}

TEST(Support, MatchesAscentOracle) {
  std::mt19937_64 eng(50);
  const Vector z = normal_vector(eng, 50);
  EXPECT_NEAR(support_l1l2(z, {2.0, 0.5, 50}), oracle::ascent_support(z, 2.0, 0.5), 1e-6);
}

TEST(Support, RejectsBadInput) {
  const Vector z = Vector::Ones(3);
  EXPECT_THROW((void)support_l1l2(z, {-1.0, 1.0, 3}), std::invalid_argument);
  EXPECT_THROW((void)support_l1l2(z, {1.0, -1.0, 3}), std::invalid_argument);
  EXPECT_THROW((void)support_l1l2(z, {1.0, 1.0, 4}), std::invalid_argument);
}

TEST(SupportProperty, HomogeneousSymmetricMonotone) {
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> radius(0.05, 3.0);
  for (int k = 0; k < 300; ++k) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(eng() % 30);
    const Vector z = normal_vector(eng, n);
    const double rho = radius(eng);
    const double s = radius(eng);
    const auto dim = static_cast<std::size_t>(n);
    const double base = support_l1l2(z, {rho, s, dim});
    const double tol = 1e-12 * (1.0 + base);
    ASSERT_NEAR(support_l1l2(3.5 * z, {rho, s, dim}), 3.5 * base, 3.5 * tol);
    ASSERT_EQ(support_l1l2(-z, {rho, s, dim}), base);
    ASSERT_GE(support_l1l2(z, {rho * 1.3, s, dim}), base - tol);
    ASSERT_GE(support_l1l2(z, {rho, s * 1.3, dim}), base - tol);
  }
}

TEST(SupportProperty, SparseSandwichAtIntegerRatios) {
  std::mt19937_64 eng(5);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index n = 16 + static_cast<Eigen::Index>(eng() % 50);
    const Vector z = normal_vector(eng, n);
    const std::size_t d = 1 + eng() % 16;
    const double s = 0.3 + static_cast<double>(eng() % 100) / 50.0;
    const double rho = s * std::sqrt(static_cast<double>(d));
    const BallIntersection set{rho, s, static_cast<std::size_t>(n)};
    ASSERT_EQ(matched_sparsity(set), d);
    const double value = support_l1l2(z, set);
    const double bound = s * top_d_l2(z, d);
    ASSERT_LE(value, 2.0 * bound * (1.0 + 1e-12));
    ASSERT_GE(value, bound * (1.0 - 1e-12));  // the d-sparse maximiser is feasible
  }
}

TEST(SoftThreshold, Shrinks) {
  Vector z(3);
  z << 2.0, -0.5, -3.0;
  const Vector out = soft_threshold(z, 1.0);
  EXPECT_DOUBLE_EQ(out[0], 1.0);
  EXPECT_DOUBLE_EQ(out[1], 0.0);
  EXPECT_DOUBLE_EQ(out[2], -2.0);
}

}  // namespace
}  // namespace sbrisk
