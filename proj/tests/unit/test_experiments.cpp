#include <gtest/gtest.h>

#include <cmath>

#include "sbrisk/experiments.hpp"

namespace sbrisk {
namespace {

SweepConfig small_sweep() {
  SweepConfig c;
  c.design = DesignSpec::rademacher(16);
  c.n_grid = {16};
  c.N_grid = {32, 64, 128};
  c.sigma_grid = {0.5};
  c.trials = 20;
  return c;
}

TEST(Truth, Kinds) {
  EXPECT_EQ(make_truth(TruthKind::kZero, 4, 2.0), Vector::Zero(4));
  const Vector spike = make_truth(TruthKind::kSpike, 4, 2.0);
  EXPECT_EQ(spike[0], 1.0);
  EXPECT_EQ(spike.tail(3), Vector::Zero(3));
  EXPECT_EQ(truth_from_name("spike"), TruthKind::kSpike);
  EXPECT_THROW((void)truth_from_name("dense"), std::invalid_argument);
}

TEST(Sweep, Validation) {
  SweepConfig c = small_sweep();
  c.trials = 5;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = small_sweep();
  c.N_grid.clear();
  EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(Sweep, NoiseFreeCellsRecoverExactly) {
  SweepConfig c = small_sweep();
  c.sigma_grid = {0.0};
  c.truth = TruthKind::kSpike;
  const SweepResult r = run_persistence_sweep(c);
  for (const auto& cell : r.cells) {
    EXPECT_EQ(cell.converged, cell.trials);
    EXPECT_LE(cell.median_error, 100.0 * c.tol * c.tol) << cell.N;
    EXPECT_EQ(cell.v.v2, 0.0);
  }
}

TEST(Sweep, MedianErrorNonDecreasingInSigma) {
  SweepConfig c = small_sweep();
  c.sigma_grid = {0.0, 0.1, 0.5, 1.0};
  const SweepResult r = run_persistence_sweep(c);
  for (std::size_t N : c.N_grid) {
    double prev = -1.0;
    for (double sigma : c.sigma_grid) {
      for (const auto& cell : r.cells) {
        if (cell.N != N || cell.sigma != sigma) continue;
        EXPECT_GE(cell.median_error, prev) << "N=" << N << " sigma=" << sigma;
        prev = cell.median_error;
      }
    }
  }
}

TEST(Sweep, RhoColumnIgnoresSigmaWhileMediansDoNot) {
  SweepConfig c = small_sweep();
  c.sigma_grid = {0.1, 0.5};
  const SweepResult r = run_persistence_sweep(c);
  for (std::size_t N : c.N_grid) {
    const SweepCell* low = nullptr;
    const SweepCell* high = nullptr;
    for (const auto& cell : r.cells) {
      if (cell.N != N) continue;
      (cell.sigma == 0.1 ? low : high) = &cell;
    }
    ASSERT_TRUE(low != nullptr && high != nullptr);
    EXPECT_EQ(low->rho.value, high->rho.value);
    EXPECT_GE(high->median_error, 5.0 * low->median_error) << N;
  }
}

TEST(Sweep, RegimeSeparation) {
  // Threshold c2 n^2 sigma^2 / R^2 = 256 for n = 16, sigma = 1.
  SweepConfig c;
  c.design = DesignSpec::rademacher(16);
  c.noise = NoiseSpec::scaled_sign(1.0);
  c.n_grid = {16};
  c.sigma_grid = {1.0};
  c.N_grid = {20, 40, 80, 160, 1024, 2048, 4096, 8192};
  c.trials = 40;
  const SweepResult r = run_persistence_sweep(c);
  ASSERT_EQ(r.slopes.size(), 1U);
  const SlopeFit& s = r.slopes.front();
  ASSERT_TRUE(std::isfinite(s.v2_branch1));
  ASSERT_TRUE(std::isfinite(s.v2_branch2));
  EXPECT_GE(std::abs(s.v2_branch1 - s.v2_branch2), 0.3) << s.v2_branch1 << " " << s.v2_branch2;
}

TEST(Sweep, ReportShapeAndDeterminism) {
  SweepConfig a = small_sweep();
  a.workers = 1;
  SweepConfig b = a;
  b.workers = 3;
  const std::string ja = format_report(to_report(run_persistence_sweep(a), a), ReportFormat::kJson);
  const std::string jb = format_report(to_report(run_persistence_sweep(b), b), ReportFormat::kJson);
  EXPECT_EQ(ja, jb);
  const Report rep = to_report(run_persistence_sweep(a), a);
  EXPECT_EQ(rep.kind, "persistence");
  EXPECT_EQ(rep.rows.size(), 3U);
  EXPECT_EQ(rep.columns.size(), 16U);
}

TEST(Counterexample, SmallRun) {
  CounterexampleConfig c;
  c.trials = 20000;
  const CounterexampleResult r = run_counterexample(c);
  EXPECT_EQ(r.one_sided.count, 0U);
  EXPECT_NEAR(r.empirical_second_moment, r.second_moment, 0.02 * r.second_moment);
  EXPECT_LE(r.two_sided.interval.lower, r.two_sided.estimate);
  EXPECT_GE(r.two_sided.interval.upper, r.two_sided.estimate);
  const Report rep = to_report(r, c);
  EXPECT_EQ(rep.rows.size(), 3U);
}

TEST(MainTheorem, NoiseFreeAlwaysCovered) {
  MainTheoremConfig c;
  c.design = DesignSpec::gaussian(8);
  c.noise = NoiseSpec::zero();
  c.N = 64;
  c.trials = 30;
  c.beta_trials = 50;
  c.directions.random_directions = 50;
  const MainTheoremResult r = verify_main_theorem(c);
  EXPECT_EQ(r.covered, 30U);
  EXPECT_EQ(r.frequency, 1.0);
  EXPECT_TRUE(r.passed);
  EXPECT_DOUBLE_EQ(r.gamma_alpha, r.tau.tau * r.tau.tau * r.tau.q_hat / 16.0);
  EXPECT_DOUBLE_EQ(r.bound, 2.0 * std::max(r.alpha.value, r.beta.value));
}

TEST(MainTheorem, Validation) {
  MainTheoremConfig c;
  c.delta = 1.5;
  EXPECT_THROW(validate(c), std::invalid_argument);
}

}  // namespace
}  // namespace sbrisk
