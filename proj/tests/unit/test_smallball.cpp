#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sbrisk/smallball.hpp"

namespace sbrisk {
namespace {

DirectionOptions few_directions(std::size_t random, std::size_t draws) {
  DirectionOptions o;
  o.random_directions = random;
  o.include_basis = false;
  o.include_pairs = false;
  o.draws = draws;
  return o;
}

TEST(EstimateQ, ZeroThresholdIsOne) {
  const SmallBallEstimate e = estimate_Q(DesignSpec::student_t(8, 3.0), 0.0);
  EXPECT_EQ(e.q_hat, 1.0);
  EXPECT_EQ(e.directions, 500U + 8U + 14U);
}

TEST(EstimateQ, RademacherBasisDirection) {
  EXPECT_EQ(direction_small_ball(DesignSpec::rademacher(4), Vector::Unit(4, 0), 0.5, 1000, 3), 1.0);
}

TEST(EstimateQ, GaussianMatchesNormalTail) {
  const double expected = oracle::gaussian_two_sided_tail(0.5);
  EXPECT_NEAR(expected, 0.617075077451973793, 1e-12);
  const SmallBallEstimate e = estimate_Q(DesignSpec::gaussian(1), 0.5, few_directions(1, 100000));
  EXPECT_NEAR(e.q_hat, expected, 3.0 * e.std_error);
}

TEST(EstimateQ, RequiresEnoughDraws) {
  EXPECT_THROW((void)estimate_Q(DesignSpec::gaussian(3), 0.5, few_directions(5, 999)), std::invalid_argument);
}

TEST(EstimateQProperty, MonotoneInThreshold) {
  const SmallBallProfile profile(DesignSpec::symmetrized_pareto(6, 3.0), DirectionOptions{});
  double prev = 1.0;
  for (double u : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    const double q = profile.estimate(u).q_hat;
    EXPECT_LE(q, prev);
    prev = q;
  }
}

TEST(EstimateQProperty, ScaleInvariantDirections) {
  Vector t(3);
  t << 0.3, -1.0, 0.2;
  const auto design = DesignSpec::gaussian(3);
  EXPECT_EQ(direction_small_ball(design, t, 0.4, 5000, 8), direction_small_ball(design, 7.0 * t, 0.4, 5000, 8));
}

TEST(PaleyZygmund, ClosedForms) {
  EXPECT_DOUBLE_EQ(paley_zygmund_Q(1.0, 4.0, 0.5), 0.5625);
  EXPECT_EQ(paley_zygmund_Q(1.3, 4.0, 1.0), 0.0);
  EXPECT_NEAR(paley_zygmund_Q(1.3, 4.0, 1.0 - 1e-9), 0.0, 1e-8);
  EXPECT_THROW((void)paley_zygmund_Q(1.0, 2.0, 0.5), std::invalid_argument);
  EXPECT_THROW((void)paley_zygmund_Q(0.9, 4.0, 0.5), std::invalid_argument);
  EXPECT_THROW((void)paley_zygmund_Q(1.0, 4.0, 1.5), std::invalid_argument);
}

TEST(MomentRatio, TrivialCases) {
  EXPECT_DOUBLE_EQ(moment_ratio_p2(DesignSpec::student_t(5, 3.0), 2.0).value, 1.0);
  DirectionOptions basis_only = few_directions(0, 1000);
  basis_only.include_basis = true;
  EXPECT_DOUBLE_EQ(moment_ratio_p2(DesignSpec::rademacher(3), 6.0, basis_only).value, 1.0);
  EXPECT_DOUBLE_EQ(l2_l1_ratio(DesignSpec::rademacher(3), basis_only), 1.0);
}

TEST(MomentRatio, GaussianFourthMoment) {
  const MomentRatio m = moment_ratio_p2(DesignSpec::gaussian(8), 4.0, few_directions(10, 100000));
  EXPECT_NEAR(m.value, std::pow(3.0, 0.25), 0.05 * std::pow(3.0, 0.25));
  EXPECT_TRUE(m.within_bound);
}

TEST(L2L1Ratio, GaussianAndBoundedUniform) {
  EXPECT_NEAR(l2_l1_ratio(DesignSpec::gaussian(8), few_directions(10, 100000)), std::sqrt(M_PI / 2.0),
              0.03 * std::sqrt(M_PI / 2.0));
  EXPECT_LE(l2_l1_ratio(DesignSpec::bounded_uniform(8, 1.0), few_directions(10, 10000)), 2.0);
}

TEST(PaleyZygmundProperty, EstimatesDominateTheBound) {
  const std::vector<DesignSpec> designs{DesignSpec::gaussian(6), DesignSpec::rademacher(6),
                                        DesignSpec::bounded_uniform(6, 1.0), DesignSpec::student_t(6, 10.0)};
  for (const auto& design : designs) {
    for (double p : {3.0, 4.0}) {
      DirectionOptions opts = few_directions(50, 20000);
      opts.include_basis = true;
      opts.include_pairs = true;
      const MomentRatio m = moment_ratio_p2(design, p, opts);
      const double kappa2 = std::max(1.0, m.value);
      const SmallBallProfile profile(design, opts);
      for (double u : {0.1, 0.25, 0.5}) {
        const SmallBallEstimate e = profile.estimate(u);
        EXPECT_GE(e.q_hat + 3.0 * e.std_error, paley_zygmund_Q(kappa2, p, u))
            << kind_name(design.kind) << " p=" << p << " u=" << u;
      }
    }
  }
}

TEST(Verify, ZeroTauAlwaysPasses) {
  SmallBallVerifyOptions opts;
  const SmallBallVerification v =
      verify_empirical_smallball(DesignSpec::gaussian(8), ClassSpec::centred(8, 1.0), 0.0, 0.5, 64, 20, opts);
  for (const auto& row : v.rows) EXPECT_EQ(row.min_count, 64U);
  EXPECT_TRUE(v.passed);
}

TEST(Verify, RejectsRadiusBeyondDiameter) {
  EXPECT_THROW((void)verify_empirical_smallball(DesignSpec::gaussian(8), ClassSpec::centred(8, 1.0), 0.2, 2.5, 64, 5),
               std::invalid_argument);
}

TEST(Verify, GaussianCellPasses) {
  const auto design = DesignSpec::gaussian(32);
  const TauChoice tau = choose_tau(design, default_tau_grid());
  const SmallBallVerification v =
      verify_empirical_smallball(design, ClassSpec::centred(32, 1.0), tau.tau, 1.0, 256, 100);
  EXPECT_GE(v.success_fraction, 0.9);
}

TEST(ChooseTau, GaussianNearAnalyticArgmax) {
  const auto grid = default_tau_grid();
  ASSERT_EQ(grid.size(), 20U);
  EXPECT_DOUBLE_EQ(grid.front(), 0.05);
  EXPECT_DOUBLE_EQ(grid.back(), 1.0);
  const double analytic = oracle::gaussian_tau_argmax(0.05, 1.0);
  const TauChoice c = choose_tau(DesignSpec::gaussian(8), grid);
  const double step = std::pow(20.0, 1.0 / 19.0);
  EXPECT_LE(c.tau, analytic * step * (1.0 + 1e-12));
  EXPECT_GE(c.tau, analytic / step * (1.0 - 1e-12));
  EXPECT_DOUBLE_EQ(c.gamma, c.tau * c.tau * c.q_hat / 16.0);
}

TEST(ChooseTau, RademacherTakesGridMaximum) {
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back(0.05 + 0.44 * k / 9.0);
  DirectionOptions basis_only = few_directions(0, 1000);
  basis_only.include_basis = true;
  const TauChoice c = choose_tau(DesignSpec::rademacher(8), grid, basis_only);
  EXPECT_DOUBLE_EQ(c.tau, grid.back());
  EXPECT_EQ(c.q_hat, 1.0);
}

}  // namespace
}  // namespace sbrisk
