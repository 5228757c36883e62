#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbrisk/distributions.hpp"
#include "sbrisk/empirical_process.hpp"
#include "sbrisk/rates.hpp"
#include "sbrisk/report.hpp"
#include "sbrisk/smallball.hpp"

namespace sbrisk {

/// How the true parameter of each sweep cell is chosen.
enum class TruthKind {
  kZero,   // t0 = 0
  kSpike,  // t0 = (R / 2) e_1
};

[[nodiscard]] std::string_view kind_name(TruthKind kind);
[[nodiscard]] TruthKind truth_from_name(std::string_view name);
[[nodiscard]] Vector make_truth(TruthKind kind, std::size_t n, double radius);

/// Grid of (n, R, sigma, N) cells. The noise kind is taken from `noise`
/// with its sigma replaced by each grid value; the rate calculators use
/// the L_{2,1} norm of the resulting noise.
struct SweepConfig {
  DesignSpec design = DesignSpec::rademacher(64);
  NoiseSpec noise = NoiseSpec::scaled_sign(0.5);
  std::vector<std::size_t> N_grid{512, 1024, 2048, 4096, 8192, 16384};
  std::vector<std::size_t> n_grid{64};
  std::vector<double> R_grid{1.0};
  std::vector<double> sigma_grid{0.5};
  TruthKind truth = TruthKind::kZero;
  std::size_t trials = 50;
  double tol = 1e-10;
  RateInputs constants;  // only c1..c7 are read
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 0;
};

/// Sweep solves stop at a projected-gradient residual of this factor times
/// SweepConfig::tol.
inline constexpr double kSweepResidualFactor = 1e-2;

void validate(const SweepConfig& config);
[[nodiscard]] nlohmann::json to_json(const SweepConfig& config);

struct SweepCell {
  std::size_t n = 0;
  std::size_t N = 0;
  double R = 0.0;
  double sigma = 0.0;      // grid value
  double noise_l21 = 0.0;  // sigma fed to the rate calculators
  std::size_t trials = 0;
  std::size_t converged = 0;
  double median_error = 0.0;  // of |t_hat - t0|_2^2
  double q90_error = 0.0;
  RhoRate rho;
  VRates v;
  bool flagged = false;  // more than 5% of solves hit the iteration cap
  std::vector<double> errors;
};

struct SlopeFit {
  std::size_t n = 0;
  double R = 0.0;
  double sigma = 0.0;
  double empirical = 0.0;      // log-log slope of median error against N
  double predicted_v = 0.0;    // same fit for max{v1, v2}
  double predicted_rho = 0.0;  // same fit for rho_N
  // Per-regime empirical slopes (NaN if fewer than two cells in the regime).
  double v2_branch1 = 0.0;
  double v2_branch2 = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  double fitted_c_v = 0.0;    // 0.9-quantile of error / max{v1, v2}
  double fitted_c_rho = 0.0;  // 0.9-quantile of error / rho_N
  std::vector<SlopeFit> slopes;
};

/// Each cell runs `trials` (sample, solve_erm, error) pipelines. Trial j
/// uses the seed trial_seed(seed, j) in every cell, so cells that differ
/// only in sigma or N are paired (samples are nested in N).
[[nodiscard]] SweepResult run_persistence_sweep(const SweepConfig& config);
[[nodiscard]] Report to_report(const SweepResult& result, const SweepConfig& config);

struct CounterexampleConfig {
  std::size_t N = 100;
  std::size_t trials = 100000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 0;
};

struct ProportionEstimate {
  std::size_t count = 0;
  std::size_t trials = 0;
  double estimate = 0.0;
  Interval interval;
};

struct CounterexampleResult {
  std::size_t N = 0;
  double second_moment = 0.0;           // 1 + 4/N - 1/N^2
  double empirical_second_moment = 0.0; // over all N * trials draws
  ProportionEstimate two_sided;         // |P_N Z^2 - E Z^2| > E Z^2 / 2
  ProportionEstimate one_sided;         // P_N Z^2 < E Z^2 / 2
};

[[nodiscard]] CounterexampleResult run_counterexample(const CounterexampleConfig& config);
[[nodiscard]] Report to_report(const CounterexampleResult& result, const CounterexampleConfig& config);

struct MainTheoremConfig {
  DesignSpec design = DesignSpec::gaussian(32);
  NoiseSpec noise = NoiseSpec::gaussian(0.5);
  std::size_t N = 512;
  double R = 1.0;
  TruthKind truth = TruthKind::kZero;
  double delta = 0.1;
  std::size_t trials = 200;        // verification solves
  std::size_t beta_trials = 200;   // Monte Carlo trials for beta*
  std::size_t alpha_trials = 0;    // 0: ceil(50 / (delta / 4))
  std::vector<double> tau_grid = default_tau_grid();
  DirectionOptions directions;     // for Q_hat; its seed is overwritten
  double tol = 1e-10;
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 0;
};

void validate(const MainTheoremConfig& config);
[[nodiscard]] nlohmann::json to_json(const MainTheoremConfig& config);

struct MainTheoremResult {
  TauChoice tau;
  double gamma_alpha = 0.0;  // tau^2 Q_hat(2 tau) / 16
  double gamma_beta = 0.0;   // tau Q_hat(2 tau) / 16
  FixedPointEstimate alpha;
  FixedPointEstimate beta;
  double bound = 0.0;        // 2 max{alpha, beta}
  std::vector<double> errors;  // |t_hat - t0|_2 per trial
  std::size_t covered = 0;
  double frequency = 0.0;
  double required = 0.0;     // 1 - delta - 2 exp(-N Q_hat^2 / 2) - 0.05
  bool passed = false;
  std::vector<std::string> flags;
};

/// Estimates tau, Q_hat, alpha* and beta*, then checks the error bound on
/// fresh samples.
[[nodiscard]] MainTheoremResult verify_main_theorem(const MainTheoremConfig& config);
[[nodiscard]] Report to_report(const MainTheoremResult& result, const MainTheoremConfig& config);

}  // namespace sbrisk
