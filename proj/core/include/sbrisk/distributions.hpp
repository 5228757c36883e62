#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sbrisk/class_spec.hpp"
#include "sbrisk/geometry.hpp"
#include "sbrisk/rng.hpp"

namespace sbrisk {

enum class DesignKind { kRademacher, kBoundedUniform, kGaussian, kStudentT, kSymmetrizedPareto };

/// Law of the iid coordinates of the design vector X. Every kind is
/// standardized to mean zero and unit variance, so X is isotropic.
///
/// bounded_uniform: uniform on [-kappa, kappa] before standardization (the
///   standardized coordinate is uniform on [-sqrt 3, sqrt 3]).
/// student_t: p degrees of freedom, scaled by sqrt((p-2)/p); needs p > 2.
/// symmetrized_pareto: random sign times a Pareto(1, p) variable, scaled by
///   sqrt((p-2)/p); needs p > 2.
struct DesignSpec {
  DesignKind kind = DesignKind::kGaussian;
  std::size_t n = 1;
  double kappa = 1.7320508075688772;
  double p = 0.0;

  static DesignSpec rademacher(std::size_t n) { return {DesignKind::kRademacher, n, 1.0, 0.0}; }
  static DesignSpec gaussian(std::size_t n) { return {DesignKind::kGaussian, n, 1.7320508075688772, 0.0}; }
  static DesignSpec bounded_uniform(std::size_t n, double kappa) { return {DesignKind::kBoundedUniform, n, kappa, 0.0}; }
  static DesignSpec student_t(std::size_t n, double p) { return {DesignKind::kStudentT, n, 0.0, p}; }
  static DesignSpec symmetrized_pareto(std::size_t n, double p) { return {DesignKind::kSymmetrizedPareto, n, 0.0, p}; }
};

enum class NoiseKind { kZero, kScaledSign, kGaussian, kBoundedSymmetric, kHeavyTailed };

/// Law of the additive noise W, independent of the design.
///
/// scaled_sign: sigma times a random sign.
/// gaussian: sigma times a standard normal.
/// bounded_symmetric: W in {-kappa, 0, kappa} with Pr(|W| = kappa) =
///   sigma^2 / kappa^2, so E W^2 = sigma^2 and |W| <= kappa (needs sigma <= kappa).
/// heavy_tailed: sigma times a standardized symmetrized Pareto(p) variable.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::kZero;
  double sigma = 0.0;
  double kappa = 0.0;
  double p = 0.0;

  static NoiseSpec zero() { return {}; }
  static NoiseSpec scaled_sign(double sigma) { return {NoiseKind::kScaledSign, sigma, 0.0, 0.0}; }
  static NoiseSpec gaussian(double sigma) { return {NoiseKind::kGaussian, sigma, 0.0, 0.0}; }
  static NoiseSpec bounded_symmetric(double sigma, double kappa) { return {NoiseKind::kBoundedSymmetric, sigma, kappa, 0.0}; }
  static NoiseSpec heavy_tailed(double sigma, double p) { return {NoiseKind::kHeavyTailed, sigma, 0.0, p}; }
};

/// Throw std::invalid_argument on parameters outside the documented ranges.
void validate(const DesignSpec& spec);
void validate(const NoiseSpec& spec);

[[nodiscard]] std::string_view kind_name(DesignKind kind);
[[nodiscard]] std::string_view kind_name(NoiseKind kind);

/// Tagged-record JSON form, e.g. {"kind":"student_t","p":4}. Parsing is
/// strict: unknown kinds, unknown keys and missing parameters throw
/// std::invalid_argument. `n` is supplied separately for designs.
[[nodiscard]] nlohmann::json to_json(const DesignSpec& spec);
[[nodiscard]] nlohmann::json to_json(const NoiseSpec& spec);
[[nodiscard]] DesignSpec design_from_json(const nlohmann::json& j, std::size_t n);
[[nodiscard]] NoiseSpec noise_from_json(const nlohmann::json& j);

/// N realisations of (X_i, Y_i) with Y_i = <t0, X_i> + W_i.
struct Sample {
  Matrix design;    // N x n, row i is X_i
  Vector responses; // length N
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(design.rows()); }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(design.cols()); }
};

/// Draws standardized coordinates of a design law. Holds distribution state
/// (e.g. the cached second normal variate), so reuse one sampler per stream.
class CoordinateSampler {
 public:
  explicit CoordinateSampler(const DesignSpec& spec);
  double operator()(Engine& eng);

 private:
  DesignSpec spec_;
  double scale_ = 1.0;
  std::normal_distribution<double> normal_;
  std::student_t_distribution<double> student_;
  std::uniform_real_distribution<double> uniform_;
};

/// Draws noise values.
class NoiseSampler {
 public:
  explicit NoiseSampler(const NoiseSpec& spec);
  double operator()(Engine& eng);

 private:
  NoiseSpec spec_;
  double scale_ = 1.0;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

/// N x n matrix of iid standardized coordinates, filled row by row from the
/// design stream of `seed`. The first N rows do not depend on the total
/// row count, so samples of growing size are nested.
[[nodiscard]] Matrix sample_design(const DesignSpec& spec, std::size_t rows, std::uint64_t seed);

/// Y_i = <t0, X_i> + W_i with W drawn from the noise stream of `seed`.
[[nodiscard]] Vector sample_response(const ClassSpec& cls, const NoiseSpec& noise,
                                     const Eigen::Ref<const Matrix>& design, std::uint64_t seed);

/// Design then responses from one seed.
[[nodiscard]] Sample draw_sample(const ClassSpec& cls, const DesignSpec& design, const NoiseSpec& noise,
                                 std::size_t rows, std::uint64_t seed);

/// Pr(|W| > t).
[[nodiscard]] double noise_survival(const NoiseSpec& spec, double t);

/// Standard deviation of W.
[[nodiscard]] double noise_l2_norm(const NoiseSpec& spec);

struct L21Norm {
  double value = 0.0;
  bool approximate = false;
};

/// |W|_{2,1} = integral_0^inf sqrt(Pr(|W| > t)) dt by adaptive quadrature.
/// Throws std::domain_error when the integral diverges (heavy tails, p <= 2).
[[nodiscard]] L21Norm l21_norm(const NoiseSpec& spec);

/// The same functional of the empirical distribution of `samples`
/// (an exact integral of a step function); always flagged approximate.
[[nodiscard]] L21Norm l21_norm_empirical(std::span<const double> samples);

/// Empirical psi_2 norm inf{c > 0 : mean exp(x_i^2 / c^2) <= 2} by bisection.
/// Requires at least 1000 samples; an all-zero sample gives 0.
[[nodiscard]] double psi2_norm(std::span<const double> samples);

/// E|zeta|^p for the standardized coordinate law; +inf when the moment
/// does not exist.
[[nodiscard]] double coordinate_abs_moment(const DesignSpec& spec, double p);

/// The N-dependent two-level variable Z: |Z| = 2 sqrt(N) with probability
/// 1/N^2 and |Z| = 1 otherwise, with an independent random sign.
struct CounterexampleSpec {
  std::size_t N = 100;
};

void validate(const CounterexampleSpec& spec);
[[nodiscard]] double counterexample_second_moment(const CounterexampleSpec& spec);
[[nodiscard]] double draw_counterexample(const CounterexampleSpec& spec, Engine& eng);

/// `trials` x N matrix; row j holds N iid draws from the stream (seed, j).
[[nodiscard]] Matrix sample_counterexample(const CounterexampleSpec& spec, std::size_t trials, std::uint64_t seed);

}  // namespace sbrisk
