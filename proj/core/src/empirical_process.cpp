#include "sbrisk/empirical_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbrisk/parallel.hpp"

namespace sbrisk {

namespace {

double default_upper(const ClassSpec& cls) { return 2.0 * cls.radius * std::sqrt(static_cast<double>(cls.n)); }

Vector signs_for(std::uint64_t seed, std::size_t count) {
  Engine eng = make_engine(seed, StreamTag::kSigns);
  Vector eps(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = random_sign(eng);
  return eps;
}

void check_signs(Eigen::Index rows, Eigen::Index signs) {
  if (rows != signs) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(rows) + " rows but " +
                                std::to_string(signs) + " signs");
  }
  if (rows == 0) throw std::invalid_argument("localized supremum needs N >= 1");
}

std::vector<double> sups_at(const std::vector<Vector>& vectors, double radius, double r) {
  std::vector<double> out(vectors.size());
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    out[j] = support_l1l2(vectors[j], {2.0 * radius, r, static_cast<std::size_t>(vectors[j].size())});
  }
  return out;
}

}  // namespace

void validate(const LocalizedSupConfig& config) {
  validate(config.cls);
  validate(config.design);
  validate(config.noise);
  if (config.design.n != config.cls.n) throw std::invalid_argument("design and class dimensions differ");
  if (config.N == 0) throw std::invalid_argument("N must be positive");
  if (config.trials == 0) throw std::invalid_argument("trials must be positive");
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return derive_seed(master, StreamTag::kTrial, trial);
}

Vector rademacher_vector(const Eigen::Ref<const Matrix>& design, const Eigen::Ref<const Vector>& signs) {
  check_signs(design.rows(), signs.size());
  return design.transpose() * signs / std::sqrt(static_cast<double>(design.rows()));
}

Vector multiplier_vector(const Sample& sample, const ClassSpec& cls, const Eigen::Ref<const Vector>& signs) {
  check_signs(sample.design.rows(), signs.size());
  if (sample.dim() != cls.n) throw std::invalid_argument("dimension mismatch between sample and class");
  const Vector xi = sample.design * cls.t0 - sample.responses;
  return sample.design.transpose() * signs.cwiseProduct(xi) / std::sqrt(static_cast<double>(sample.size()));
}

double rademacher_sup(const Eigen::Ref<const Matrix>& design, const Eigen::Ref<const Vector>& signs, double radius,
                      double r) {
  const Vector z = rademacher_vector(design, signs);
  return support_l1l2(z, {2.0 * radius, r, static_cast<std::size_t>(z.size())});
}

double multiplier_sup(const Sample& sample, const ClassSpec& cls, const Eigen::Ref<const Vector>& signs, double s) {
  const Vector z = multiplier_vector(sample, cls, signs);
  return support_l1l2(z, {2.0 * cls.radius, s, cls.n});
}

std::vector<Vector> rademacher_vectors(const LocalizedSupConfig& config) {
  validate(config);
  std::vector<Vector> out(config.trials);
  parallel_for(config.trials, config.workers, [&](std::size_t j) {
    const std::uint64_t seed = trial_seed(config.seed, j);
    const Matrix x = sample_design(config.design, config.N, seed);
    out[j] = rademacher_vector(x, signs_for(seed, config.N));
  });
  return out;
}

std::vector<Vector> multiplier_vectors(const LocalizedSupConfig& config) {
  validate(config);
  std::vector<Vector> out(config.trials);
  parallel_for(config.trials, config.workers, [&](std::size_t j) {
    const std::uint64_t seed = trial_seed(config.seed, j);
    const Sample sample = draw_sample(config.cls, config.design, config.noise, config.N, seed);
    out[j] = multiplier_vector(sample, config.cls, signs_for(seed, config.N));
  });
  return out;
}

MeanEstimate mean_localized_sup(const std::vector<Vector>& vectors, double radius, double r) {
  if (vectors.empty()) throw std::invalid_argument("mean_localized_sup: no trials");
  const std::vector<double> sups = sups_at(vectors, radius, r);
  return mean_with_stderr(sups);
}

MeanEstimate expected_rademacher_sup(const LocalizedSupConfig& config, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("expected_rademacher_sup: r must be >= 0");
  return mean_localized_sup(rademacher_vectors(config), config.cls.radius, r);
}

std::string_view kind_name(FixedPointKind kind) {
  switch (kind) {
    case FixedPointKind::kAlpha:
      return "alpha";
    case FixedPointKind::kBeta:
      return "beta";
    case FixedPointKind::kKStar:
      return "kstar";
  }
  return "unknown";
}

bool FixedPointEstimate::flagged(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

nlohmann::json to_json(const FixedPointEstimate& e) {
  return {{"kind", kind_name(e.kind)},
          {"value", e.value},
          {"brackets", {e.lower, e.upper}},
          {"trials", e.trials},
          {"stderr", e.std_error},
          {"flags", e.flags}};
}

FixedPointEstimate fixed_point_from_vectors(const std::vector<Vector>& vectors, const ClassSpec& cls, std::size_t N,
                                            double gamma, int power, const FixedPointOptions& options) {
  validate(cls);
  if (!(gamma > 0.0)) throw std::invalid_argument("fixed point: gamma must be positive");
  if (power != 1 && power != 2) throw std::invalid_argument("fixed point: power must be 1 or 2");
  if (vectors.empty()) throw std::invalid_argument("fixed point: no trials");
  if (!(options.relative_width > 0.0 && options.relative_width < 1.0)) {
    throw std::invalid_argument("fixed point: relative_width must lie in (0, 1)");
  }

  FixedPointEstimate est;
  est.kind = power == 1 ? FixedPointKind::kBeta : FixedPointKind::kKStar;
  est.trials = vectors.size();
  if (cls.radius == 0.0) {
    est.flags.emplace_back("degenerate_class");
    return est;
  }

  const double cap = default_upper(cls);
  double lo = options.r_lo > 0.0 ? options.r_lo : 1e-4 * cls.radius;
  double hi = options.r_hi > 0.0 ? options.r_hi : cap;
  if (!(lo < hi)) throw std::invalid_argument("fixed point: need r_lo < r_hi");

  const double root_n = std::sqrt(static_cast<double>(N));
  auto holds = [&](double r) {
    const MeanEstimate m = mean_localized_sup(vectors, cls.radius, r);
    return m.mean <= gamma * std::pow(r, power) * root_n;
  };
  auto finish = [&](double value) {
    est.value = value;
    est.std_error = mean_localized_sup(vectors, cls.radius, value).std_error;
    return est;
  };

  if (holds(lo)) {
    est.lower = 0.0;
    est.upper = lo;
    est.flags.emplace_back("at_lower_limit");
    return finish(lo);
  }
  // Expand upwards until the condition holds or the cap is passed.
  while (!holds(hi)) {
    if (hi >= cap) {
      est.lower = hi;
      est.upper = hi;
      est.flags.emplace_back("not_attained");
      return finish(hi);
    }
    lo = hi;
    hi = std::min(2.0 * hi, cap);
  }
  // Log-scale bisection; the ratio sup(r) / r^power is non-increasing.
  while (hi - lo > options.relative_width * hi) {
    const double mid = std::sqrt(lo * hi);
    if (holds(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  est.lower = lo;
  est.upper = hi;
  return finish(hi);
}

FixedPointEstimate beta_star(const LocalizedSupConfig& config, double gamma, const FixedPointOptions& options) {
  if (config.cls.radius == 0.0) return fixed_point_from_vectors({Vector::Zero(1)}, config.cls, config.N, gamma, 1, options);
  return fixed_point_from_vectors(rademacher_vectors(config), config.cls, config.N, gamma, 1, options);
}

FixedPointEstimate k_star(const LocalizedSupConfig& config, double gamma, const FixedPointOptions& options) {
  if (config.cls.radius == 0.0) return fixed_point_from_vectors({Vector::Zero(1)}, config.cls, config.N, gamma, 2, options);
  return fixed_point_from_vectors(rademacher_vectors(config), config.cls, config.N, gamma, 2, options);
}

FixedPointEstimate alpha_from_vectors(const std::vector<Vector>& vectors, const ClassSpec& cls, std::size_t N,
                                      double gamma, double delta, const AlphaOptions& options) {
  validate(cls);
  if (!(gamma > 0.0)) throw std::invalid_argument("alpha_star: gamma must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("alpha_star: delta must lie in (0, 1)");
  if (!(options.ratio > 1.0)) throw std::invalid_argument("alpha_star: grid ratio must exceed 1");
  const std::size_t trials = vectors.size();
  if (static_cast<double>(trials) < 50.0 / delta) {
    throw std::invalid_argument("alpha_star: needs at least 50/delta trials, got " + std::to_string(trials));
  }

  FixedPointEstimate est;
  est.kind = FixedPointKind::kAlpha;
  est.trials = trials;
  if (cls.radius == 0.0) {
    est.flags.emplace_back("degenerate_class");
    return est;
  }

  const double s_min = options.s_min > 0.0 ? options.s_min : 1e-4 * cls.radius;
  const double s_max = options.s_max > 0.0 ? options.s_max : default_upper(cls);
  if (!(s_min < s_max)) throw std::invalid_argument("alpha_star: need s_min < s_max");
  const double root_n = std::sqrt(static_cast<double>(N));
  const double target = 1.0 - delta;

  double previous = 0.0;
  double s = s_min;
  std::size_t successes = 0;
  for (;;) {
    const std::vector<double> phi = sups_at(vectors, cls.radius, s);
    const double threshold = gamma * s * s * root_n;
    successes = static_cast<std::size_t>(std::count_if(phi.begin(), phi.end(), [&](double v) { return v <= threshold; }));
    if (static_cast<double>(successes) >= target * static_cast<double>(trials)) break;
    const double next = s * options.ratio;
    if (next > s_max * (1.0 + kRadiusSlack)) {
      est.flags.emplace_back("grid_exhausted");
      break;
    }
    previous = s;
    s = next;
  }

  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  est.value = s;
  est.lower = previous;
  est.upper = s;
  est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  const Interval w = wilson_interval(successes, trials, 2.0);
  if (w.lower <= target && target <= w.upper) est.flags.emplace_back("near_threshold");
  if (previous == 0.0 && !est.flagged("grid_exhausted")) est.flags.emplace_back("at_lower_limit");
  return est;
}

FixedPointEstimate alpha_star(const LocalizedSupConfig& config, double gamma, double delta,
                              const AlphaOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("alpha_star: delta must lie in (0, 1)");
  if (static_cast<double>(config.trials) < 50.0 / delta) {
    throw std::invalid_argument("alpha_star: needs at least 50/delta trials, got " + std::to_string(config.trials));
  }
  return alpha_from_vectors(multiplier_vectors(config), config.cls, config.N, gamma, delta, options);
}

}  // namespace sbrisk
