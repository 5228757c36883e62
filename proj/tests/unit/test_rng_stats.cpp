#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <set>
#include <vector>

#include "sbrisk/parallel.hpp"
#include "sbrisk/rng.hpp"
#include "sbrisk/stats.hpp"

namespace sbrisk {
namespace {

TEST(Rng, DerivedSeedsArePureAndDistinct) {
  EXPECT_EQ(derive_seed(1, StreamTag::kDesign, 3), derive_seed(1, StreamTag::kDesign, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {std::uint64_t{0}, std::uint64_t{1}, kDefaultSeed}) {
    for (auto tag : {StreamTag::kDesign, StreamTag::kNoise, StreamTag::kSigns, StreamTag::kTrial}) {
      for (std::uint64_t i = 0; i < 100; ++i) seen.insert(derive_seed(master, tag, i));
    }
  }
  EXPECT_EQ(seen.size(), 3U * 4U * 100U);
}

TEST(Rng, EnginesReplay) {
  Engine a = make_engine(7, StreamTag::kGeneric, 2);
  Engine b = make_engine(7, StreamTag::kGeneric, 2);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, SignsAreBalanced) {
  Engine eng = make_engine(1, StreamTag::kSigns);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double s = random_sign(eng);
    ASSERT_TRUE(s == 1.0 || s == -1.0);
    sum += s;
  }
  EXPECT_LT(std::abs(sum) / 100000.0, 0.01);
}

TEST(Stats, PairwiseSumIsAccurate) {
  std::vector<double> v(1 << 20, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 0.1 * (1 << 20), 1e-8);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Stats, MeanAndStderr) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const MeanEstimate m = mean_with_stderr(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(mean_with_stderr(std::vector<double>{5.0}).std_error, 0.0);
}

TEST(Stats, Quantiles) {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(median(v), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.9), 3.7);
}

TEST(Stats, WilsonIntervalKnownValue) {
  // 50 / 100 at z = 1.96: 0.5 +- 0.0961.
  const Interval ci = wilson_interval(50, 100);
  EXPECT_NEAR(ci.lower, 0.40383, 1e-4);
  EXPECT_NEAR(ci.upper, 0.59617, 1e-4);
  const Interval zero = wilson_interval(0, 1000);
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_GT(zero.upper, 0.0);
  const Interval all = wilson_interval(1000, 1000);
  EXPECT_EQ(all.upper, 1.0);
  EXPECT_LT(all.lower, 1.0);
}

TEST(Stats, NormalCdf) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
}

TEST(Stats, LineFit) {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
  const LineFit f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
}

TEST(Parallel, IndexAddressedResultsIgnoreWorkerCount) {
  std::vector<double> one(1000);
  std::vector<double> four(1000);
  auto body = [](std::vector<double>& out) {
    return [&out](std::size_t i) {
      Engine eng = make_engine(3, StreamTag::kTrial, i);
      out[i] = static_cast<double>(eng() % 1000);
    };
  };
  parallel_for(one.size(), 1, body(one));
  parallel_for(four.size(), 4, body(four));
  EXPECT_EQ(one, four);
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Parallel, DefaultWorkersReadsEnvironment) {
  ::setenv("SBRISK_WORKERS", "3", 1);
  EXPECT_EQ(default_workers(), 3U);
  ::setenv("SBRISK_WORKERS", "junk", 1);
  EXPECT_EQ(default_workers(), 1U);
  ::unsetenv("SBRISK_WORKERS");
  EXPECT_EQ(default_workers(), 1U);
}

}  // namespace
}  // namespace sbrisk
