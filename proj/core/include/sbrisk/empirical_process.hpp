#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbrisk/class_spec.hpp"
#include "sbrisk/distributions.hpp"
#include "sbrisk/geometry.hpp"
#include "sbrisk/rng.hpp"
#include "sbrisk/stats.hpp"

namespace sbrisk {

/// Monte Carlo setup shared by the localized suprema. Trial j draws a fresh
/// sample of size N and fresh signs from the seed derive_seed(seed, kTrial, j).
///
/// Localized sets are the symmetric superset 2R B_1^n intersected with
/// r B_2^n of {t - t0 : t in R B_1^n, |t - t0|_2 <= r}.
struct LocalizedSupConfig {
  ClassSpec cls;
  DesignSpec design;
  NoiseSpec noise;  // only used by the multiplier process
  std::size_t N = 1;
  std::size_t trials = 200;
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 0;  // 0: default_workers()
};

void validate(const LocalizedSupConfig& config);

/// Seed of Monte Carlo trial j.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

/// N^{-1/2} sum_i eps_i X_i.
[[nodiscard]] Vector rademacher_vector(const Eigen::Ref<const Matrix>& design, const Eigen::Ref<const Vector>& signs);

/// N^{-1/2} sum_i eps_i xi_i X_i with xi_i = <t0, X_i> - Y_i.
[[nodiscard]] Vector multiplier_vector(const Sample& sample, const ClassSpec& cls, const Eigen::Ref<const Vector>& signs);

/// sup over 2R B_1 cap r B_2 of |N^{-1/2} sum eps_i <t, X_i>|.
[[nodiscard]] double rademacher_sup(const Eigen::Ref<const Matrix>& design, const Eigen::Ref<const Vector>& signs,
                                    double radius, double r);

/// sup over 2R B_1 cap s B_2 of |N^{-1/2} sum eps_i xi_i <t, X_i>|.
[[nodiscard]] double multiplier_sup(const Sample& sample, const ClassSpec& cls, const Eigen::Ref<const Vector>& signs,
                                    double s);

/// The per-trial vectors Z_j that drive the suprema. Every localized
/// supremum of trial j at any radius is support_l1l2(Z_j, (2R, r)), so
/// reusing these vectors across radii gives common random numbers.
[[nodiscard]] std::vector<Vector> rademacher_vectors(const LocalizedSupConfig& config);
[[nodiscard]] std::vector<Vector> multiplier_vectors(const LocalizedSupConfig& config);

/// Monte Carlo mean of the localized Rademacher supremum at radius r.
[[nodiscard]] MeanEstimate expected_rademacher_sup(const LocalizedSupConfig& config, double r);

/// Mean and standard error of support_l1l2(Z_j, (2R, r)) over precomputed vectors.
[[nodiscard]] MeanEstimate mean_localized_sup(const std::vector<Vector>& vectors, double radius, double r);

enum class FixedPointKind { kAlpha, kBeta, kKStar };

[[nodiscard]] std::string_view kind_name(FixedPointKind kind);

struct FixedPointEstimate {
  FixedPointKind kind = FixedPointKind::kBeta;
  double value = 0.0;
  double lower = 0.0;   // largest probed radius failing the condition (0 if none)
  double upper = 0.0;   // smallest probed radius satisfying it
  std::size_t trials = 0;
  double std_error = 0.0;  // trial-level standard error at `value`
  std::vector<std::string> flags;

  [[nodiscard]] bool flagged(std::string_view flag) const;
  [[nodiscard]] double bracket_width() const { return upper - lower; }
};

[[nodiscard]] nlohmann::json to_json(const FixedPointEstimate& estimate);

/// Radius range searched by beta_star / k_star. Zero values select the
/// defaults r_lo = 1e-4 R and r_hi = 2 R sqrt(n).
struct FixedPointOptions {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double relative_width = 1e-2;
};

/// beta*_N(gamma): smallest r with E sup(r) <= gamma r sqrt(N).
[[nodiscard]] FixedPointEstimate beta_star(const LocalizedSupConfig& config, double gamma,
                                           const FixedPointOptions& options = {});

/// k*_N(gamma): smallest r with E sup(r) <= gamma r^2 sqrt(N).
[[nodiscard]] FixedPointEstimate k_star(const LocalizedSupConfig& config, double gamma,
                                        const FixedPointOptions& options = {});

/// Bisection on precomputed vectors; `power` is 1 for beta and 2 for k*.
[[nodiscard]] FixedPointEstimate fixed_point_from_vectors(const std::vector<Vector>& vectors, const ClassSpec& cls,
                                                          std::size_t N, double gamma, int power,
                                                          const FixedPointOptions& options = {});

/// Geometric grid for alpha_star. Zero values select s_min = 1e-4 R and
/// s_max = 2 R sqrt(n).
struct AlphaOptions {
  double s_min = 0.0;
  double s_max = 0.0;
  double ratio = 1.1;
};

/// alpha*_N(gamma, delta): smallest grid point s at which the fraction of
/// trials with phi_N(s) <= gamma s^2 sqrt(N) reaches 1 - delta. Requires
/// config.trials >= 50 / delta.
[[nodiscard]] FixedPointEstimate alpha_star(const LocalizedSupConfig& config, double gamma, double delta,
                                            const AlphaOptions& options = {});

[[nodiscard]] FixedPointEstimate alpha_from_vectors(const std::vector<Vector>& vectors, const ClassSpec& cls,
                                                    std::size_t N, double gamma, double delta,
                                                    const AlphaOptions& options = {});

}  // namespace sbrisk
