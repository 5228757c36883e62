#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbrisk/class_spec.hpp"
#include "sbrisk/distributions.hpp"
#include "sbrisk/geometry.hpp"
#include "sbrisk/rng.hpp"

namespace sbrisk {

/// Direction set used to approximate an infimum over unit directions:
/// `random_directions` uniform points on the sphere, optionally followed by
/// the n basis vectors and the 2(n-1) vectors (e_i +- e_{i+1}) / sqrt 2.
struct DirectionOptions {
  std::size_t random_directions = 500;
  bool include_basis = true;
  bool include_pairs = true;
  std::size_t draws = 1000;  // design draws per direction
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 0;
};

struct SmallBallEstimate {
  double u = 0.0;
  double q_hat = 1.0;        // minimum over all directions
  double q_random = 1.0;     // minimum over the random directions only
  double q_structured = 1.0; // minimum over basis and pair directions only
  std::size_t directions = 0;
  std::size_t draws = 0;
  double std_error = 0.0;    // binomial standard error at the minimising direction
  std::vector<std::string> flags;
};

[[nodiscard]] nlohmann::json to_json(const SmallBallEstimate& estimate);

/// Sorted |<X, t>| samples for every probe direction. Q estimates at
/// different thresholds reuse the same draws, so they are monotone in u.
class SmallBallProfile {
 public:
  SmallBallProfile(const DesignSpec& design, const DirectionOptions& options);

  [[nodiscard]] SmallBallEstimate estimate(double u) const;
  [[nodiscard]] std::size_t directions() const { return projections_.size(); }

 private:
  std::vector<std::vector<double>> projections_;
  std::vector<bool> structured_;
  std::size_t draws_ = 0;
};

/// Q_hat(u) = min over probe directions t of the fraction of draws with
/// |<X, t>| >= u. Needs at least 1000 draws per direction.
[[nodiscard]] SmallBallEstimate estimate_Q(const DesignSpec& design, double u, const DirectionOptions& options = {});

/// Fraction of `draws` design vectors with |<X, t>| >= u |t|_2 for one direction.
[[nodiscard]] double direction_small_ball(const DesignSpec& design, const Eigen::Ref<const Vector>& t, double u,
                                          std::size_t draws, std::uint64_t seed);

/// ((1 - u^2) / kappa2^2)^{p / (p - 2)}: the small-ball lower bound implied
/// by an L_p / L_2 norm ratio kappa2 at exponent p > 2.
[[nodiscard]] double paley_zygmund_Q(double kappa2, double p, double u);

/// Largest empirical norm ratio over the probe directions, with the
/// comparison value c sqrt(p) kappa (c = 10, kappa the coordinate L_p norm).
struct MomentRatio {
  double value = 0.0;
  double coordinate_norm = 0.0;
  double bound = 0.0;
  bool within_bound = false;
};

inline constexpr double kMomentRatioConstant = 10.0;

/// sup_t |<X,t>|_{L_p} / |<X,t>|_{L_2} over the probe directions.
[[nodiscard]] MomentRatio moment_ratio_p2(const DesignSpec& design, double p, const DirectionOptions& options = {});

/// sup_t |<X,t>|_{L_2} / |<X,t>|_{L_1} over the probe directions.
[[nodiscard]] double l2_l1_ratio(const DesignSpec& design, const DirectionOptions& options = {});

struct SmallBallTrialRow {
  std::size_t trial = 0;
  std::size_t min_count = 0;
  double threshold = 0.0;
  bool pass = false;
};

struct SmallBallVerification {
  double tau = 0.0;
  double r = 0.0;
  double q_hat = 0.0;         // Q_hat(2 tau)
  double threshold = 0.0;     // N Q_hat(2 tau) / 4
  double success_fraction = 0.0;
  double required = 0.0;      // 1 - 2 exp(-N Q_hat^2 / 2) - 0.05
  bool passed = false;
  std::size_t probes = 0;
  std::vector<SmallBallTrialRow> rows;
};

struct SmallBallVerifyOptions {
  std::size_t probes = 100;
  double q_hat = -1.0;  // negative: estimate Q_hat(2 tau) with `directions`
  DirectionOptions directions;
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 0;
};

/// For each trial draws N design rows and probes h = <t, .> with t in
/// 2R B_1^n and |t|_2 = r, recording the smallest count of
/// |h(X_i)| >= tau |h|_{L_2} over the probes. Throws if r > 2R.
[[nodiscard]] SmallBallVerification verify_empirical_smallball(const DesignSpec& design, const ClassSpec& cls,
                                                               double tau, double r, std::size_t N,
                                                               std::size_t trials,
                                                               const SmallBallVerifyOptions& options = {});

/// 20 geometric points in [0.05, 1].
[[nodiscard]] std::vector<double> default_tau_grid();

struct TauChoice {
  double tau = 0.0;
  double q_hat = 0.0;  // Q_hat(2 tau)
  double gamma = 0.0;  // tau^2 Q_hat(2 tau) / 16
  std::vector<double> grid;
  std::vector<double> q_values;
  std::vector<std::string> flags;
};

/// Maximises tau^2 Q_hat(2 tau) over the grid. Flags "no_small_ball" when
/// every estimate is zero.
[[nodiscard]] TauChoice choose_tau(const DesignSpec& design, const std::vector<double>& tau_grid,
                                   const DirectionOptions& options = {});

}  // namespace sbrisk
