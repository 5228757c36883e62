#include "sbrisk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sbrisk {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

double student_scale(double p) { return std::sqrt((p - 2.0) / p); }
double pareto_scale(double p) { return std::sqrt((p - 2.0) / p); }

void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw std::invalid_argument(std::string(what) + ": unknown key '" + key + "'");
    }
  }
}

double number_at(const nlohmann::json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw std::invalid_argument(std::string(what) + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw std::invalid_argument(std::string(what) + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

void validate(const ClassSpec& cls) {
  if (cls.n == 0) throw std::invalid_argument("ClassSpec: n must be positive");
  if (!(cls.radius >= 0.0) || !std::isfinite(cls.radius)) {
    throw std::invalid_argument("ClassSpec: radius must be finite and >= 0");
  }
  if (static_cast<std::size_t>(cls.t0.size()) != cls.n) {
    throw std::invalid_argument("ClassSpec: t0 length differs from n");
  }
  require_finite(cls.t0, "ClassSpec.t0");
  if (cls.t0.lpNorm<1>() > cls.radius * (1.0 + kRadiusSlack)) {
    throw std::invalid_argument("ClassSpec: |t0|_1 exceeds the radius");
  }
}

void validate(const DesignSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("DesignSpec: n must be positive");
  switch (spec.kind) {
    case DesignKind::kRademacher:
    case DesignKind::kGaussian:
      return;
    case DesignKind::kBoundedUniform:
      if (!(spec.kappa > 0.0) || !std::isfinite(spec.kappa)) {
        throw std::invalid_argument("DesignSpec: bounded_uniform needs kappa > 0");
      }
      return;
    case DesignKind::kStudentT:
    case DesignKind::kSymmetrizedPareto:
      if (!(spec.p > 2.0) || !std::isfinite(spec.p)) {
        throw std::invalid_argument("DesignSpec: heavy-tailed design needs p > 2");
      }
      return;
  }
  throw std::invalid_argument("DesignSpec: unknown kind");
}

void validate(const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw std::invalid_argument("NoiseSpec: sigma must be finite and >= 0");
  }
  switch (spec.kind) {
    case NoiseKind::kZero:
    case NoiseKind::kScaledSign:
    case NoiseKind::kGaussian:
      return;
    case NoiseKind::kBoundedSymmetric:
      if (!(spec.kappa > 0.0) || spec.sigma > spec.kappa) {
        throw std::invalid_argument("NoiseSpec: bounded_symmetric needs 0 <= sigma <= kappa, kappa > 0");
      }
      return;
    case NoiseKind::kHeavyTailed:
      if (!(spec.p > 2.0) || !std::isfinite(spec.p)) {
        throw std::invalid_argument("NoiseSpec: heavy_tailed needs p > 2");
      }
      return;
  }
  throw std::invalid_argument("NoiseSpec: unknown kind");
}

std::string_view kind_name(DesignKind kind) {
  switch (kind) {
    case DesignKind::kRademacher: return "rademacher";
    case DesignKind::kBoundedUniform: return "bounded_uniform";
    case DesignKind::kGaussian: return "gaussian";
    case DesignKind::kStudentT: return "student_t";
    case DesignKind::kSymmetrizedPareto: return "symmetrized_pareto";
  }
  return "unknown";
}

std::string_view kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kZero: return "zero";
    case NoiseKind::kScaledSign: return "scaled_sign";
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kBoundedSymmetric: return "bounded_symmetric";
    case NoiseKind::kHeavyTailed: return "heavy_tailed";
  }
  return "unknown";
}

nlohmann::json to_json(const DesignSpec& spec) {
  nlohmann::json j{{"kind", kind_name(spec.kind)}};
  if (spec.kind == DesignKind::kBoundedUniform) j["kappa"] = spec.kappa;
  if (spec.kind == DesignKind::kStudentT || spec.kind == DesignKind::kSymmetrizedPareto) j["p"] = spec.p;
  return j;
}

nlohmann::json to_json(const NoiseSpec& spec) {
  nlohmann::json j{{"kind", kind_name(spec.kind)}};
  if (spec.kind != NoiseKind::kZero) j["sigma"] = spec.sigma;
  if (spec.kind == NoiseKind::kBoundedSymmetric) j["kappa"] = spec.kappa;
  if (spec.kind == NoiseKind::kHeavyTailed) j["p"] = spec.p;
  return j;
}

DesignSpec design_from_json(const nlohmann::json& j, std::size_t n) {
  constexpr const char* what = "design";
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw std::invalid_argument("design: expected {\"kind\": ...}");
  }
  const auto kind = j.at("kind").get<std::string>();
  DesignSpec spec;
  if (kind == "rademacher") {
    require_keys(j, {"kind"}, what);
    spec = DesignSpec::rademacher(n);
  } else if (kind == "gaussian") {
    require_keys(j, {"kind"}, what);
    spec = DesignSpec::gaussian(n);
  } else if (kind == "bounded_uniform") {
    require_keys(j, {"kind", "kappa"}, what);
    spec = DesignSpec::bounded_uniform(n, j.contains("kappa") ? number_at(j, "kappa", what) : kSqrt3);
  } else if (kind == "student_t") {
    require_keys(j, {"kind", "p"}, what);
    spec = DesignSpec::student_t(n, number_at(j, "p", what));
  } else if (kind == "symmetrized_pareto") {
    require_keys(j, {"kind", "p"}, what);
    spec = DesignSpec::symmetrized_pareto(n, number_at(j, "p", what));
  } else {
    throw std::invalid_argument("design: unknown kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

NoiseSpec noise_from_json(const nlohmann::json& j) {
  constexpr const char* what = "noise";
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw std::invalid_argument("noise: expected {\"kind\": ...}");
  }
  const auto kind = j.at("kind").get<std::string>();
  NoiseSpec spec;
  if (kind == "zero") {
    require_keys(j, {"kind"}, what);
    spec = NoiseSpec::zero();
  } else if (kind == "scaled_sign") {
    require_keys(j, {"kind", "sigma"}, what);
    spec = NoiseSpec::scaled_sign(number_at(j, "sigma", what));
  } else if (kind == "gaussian") {
    require_keys(j, {"kind", "sigma"}, what);
    spec = NoiseSpec::gaussian(number_at(j, "sigma", what));
  } else if (kind == "bounded_symmetric") {
    require_keys(j, {"kind", "sigma", "kappa"}, what);
    spec = NoiseSpec::bounded_symmetric(number_at(j, "sigma", what), number_at(j, "kappa", what));
  } else if (kind == "heavy_tailed") {
    require_keys(j, {"kind", "sigma", "p"}, what);
    spec = NoiseSpec::heavy_tailed(number_at(j, "sigma", what), number_at(j, "p", what));
  } else {
    throw std::invalid_argument("noise: unknown kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

CoordinateSampler::CoordinateSampler(const DesignSpec& spec)
    : spec_(spec), student_(spec.kind == DesignKind::kStudentT ? spec.p : 3.0), uniform_(0.0, 1.0) {
  validate(spec_);
  if (spec_.kind == DesignKind::kStudentT) scale_ = student_scale(spec_.p);
  if (spec_.kind == DesignKind::kSymmetrizedPareto) scale_ = pareto_scale(spec_.p);
}

double CoordinateSampler::operator()(Engine& eng) {
  switch (spec_.kind) {
    case DesignKind::kRademacher:
      return random_sign(eng);
    case DesignKind::kGaussian:
      return normal_(eng);
    case DesignKind::kBoundedUniform:
      return kSqrt3 * (2.0 * uniform_(eng) - 1.0);
    case DesignKind::kStudentT:
      return scale_ * student_(eng);
    case DesignKind::kSymmetrizedPareto: {
      const double sign = random_sign(eng);
      const double u = 1.0 - uniform_(eng);  // (0, 1]
      return sign * scale_ * std::pow(u, -1.0 / spec_.p);
    }
  }
  return 0.0;
}

NoiseSampler::NoiseSampler(const NoiseSpec& spec) : spec_(spec), uniform_(0.0, 1.0) {
  validate(spec_);
  if (spec_.kind == NoiseKind::kHeavyTailed) scale_ = pareto_scale(spec_.p);
}

double NoiseSampler::operator()(Engine& eng) {
  switch (spec_.kind) {
    case NoiseKind::kZero:
      return 0.0;
    case NoiseKind::kScaledSign:
      return spec_.sigma * random_sign(eng);
    case NoiseKind::kGaussian:
      return spec_.sigma * normal_(eng);
    case NoiseKind::kBoundedSymmetric: {
      const double sign = random_sign(eng);
      const double mass = (spec_.sigma / spec_.kappa) * (spec_.sigma / spec_.kappa);
      return uniform_(eng) < mass ? sign * spec_.kappa : 0.0;
    }
    case NoiseKind::kHeavyTailed: {
      const double sign = random_sign(eng);
      const double u = 1.0 - uniform_(eng);
      return sign * spec_.sigma * scale_ * std::pow(u, -1.0 / spec_.p);
    }
  }
  return 0.0;
}

Matrix sample_design(const DesignSpec& spec, std::size_t rows, std::uint64_t seed) {
  CoordinateSampler draw(spec);
  Engine eng = make_engine(seed, StreamTag::kDesign);
  Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(spec.n));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = draw(eng);
  }
  return x;
}

Vector sample_response(const ClassSpec& cls, const NoiseSpec& noise, const Eigen::Ref<const Matrix>& design,
                       std::uint64_t seed) {
  validate(cls);
  if (static_cast<std::size_t>(design.cols()) != cls.n) {
    throw std::invalid_argument("sample_response: design has " + std::to_string(design.cols()) +
                                " columns, class dimension is " + std::to_string(cls.n));
  }
  NoiseSampler draw(noise);
  Engine eng = make_engine(seed, StreamTag::kNoise);
  Vector y = design * cls.t0;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += draw(eng);
  return y;
}

Sample draw_sample(const ClassSpec& cls, const DesignSpec& design, const NoiseSpec& noise, std::size_t rows,
                   std::uint64_t seed) {
  if (design.n != cls.n) throw std::invalid_argument("draw_sample: design and class dimensions differ");
  Sample s;
  s.seed = seed;
  s.design = sample_design(design, rows, seed);
  s.responses = sample_response(cls, noise, s.design, seed);
  return s;
}

double noise_survival(const NoiseSpec& spec, double t) {
  if (t < 0.0) return 1.0;
  switch (spec.kind) {
    case NoiseKind::kZero:
      return 0.0;
    case NoiseKind::kScaledSign:
      return t < spec.sigma ? 1.0 : 0.0;
    case NoiseKind::kGaussian:
      return spec.sigma == 0.0 ? 0.0 : std::erfc(t / (spec.sigma * std::numbers::sqrt2));
    case NoiseKind::kBoundedSymmetric:
      return t < spec.kappa ? (spec.sigma / spec.kappa) * (spec.sigma / spec.kappa) : 0.0;
    case NoiseKind::kHeavyTailed: {
      if (spec.sigma == 0.0) return 0.0;
      const double floor = spec.sigma * pareto_scale(spec.p);  // smallest |W|
      return t < floor ? 1.0 : std::pow(t / floor, -spec.p);
    }
  }
  return 0.0;
}

double noise_l2_norm(const NoiseSpec& spec) {
  return spec.kind == NoiseKind::kZero ? 0.0 : spec.sigma;
}

L21Norm l21_norm(const NoiseSpec& spec) {
  if (spec.kind == NoiseKind::kHeavyTailed && !(spec.p > 2.0)) {
    throw std::domain_error("l21_norm: integral diverges for heavy tails with p <= 2");
  }
  validate(spec);
  if (spec.kind == NoiseKind::kZero || spec.sigma == 0.0) return {0.0, false};

  auto integrand = [&spec](double t) { return std::sqrt(noise_survival(spec, t)); };
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  constexpr double kTol = 1e-10;
  constexpr unsigned kMaxDepth = 30;

  // Integrate up to the last discontinuity of the survival function with
  // Gauss-Kronrod and the smooth tail with exp-sinh.
  double breakpoint = 0.0;
  switch (spec.kind) {
    case NoiseKind::kScaledSign: breakpoint = spec.sigma; break;
    case NoiseKind::kBoundedSymmetric: breakpoint = spec.kappa; break;
    case NoiseKind::kHeavyTailed: breakpoint = spec.sigma * pareto_scale(spec.p); break;
    default: break;
  }

  double body = 0.0;
  double body_err = 0.0;
  if (breakpoint > 0.0) {
    body = gauss_kronrod<double, 61>::integrate(integrand, 0.0, breakpoint, kMaxDepth, kTol, &body_err);
  }
  double tail = 0.0;
  double tail_err = 0.0;
  const bool bounded = spec.kind == NoiseKind::kScaledSign || spec.kind == NoiseKind::kBoundedSymmetric;
  if (!bounded) {
    exp_sinh<double> integrator;
    auto shifted = [&](double u) { return integrand(breakpoint + u); };
    tail = integrator.integrate(shifted, kTol, &tail_err);
  }
  const double value = body + tail;
  if (body_err + tail_err > 1e-6 * value) {
    throw std::runtime_error("l21_norm: quadrature did not reach 1e-6 relative accuracy");
  }
  return {value, false};
}

L21Norm l21_norm_empirical(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("l21_norm_empirical: empty sample");
  std::vector<double> mags(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) mags[i] = std::abs(samples[i]);
  std::sort(mags.begin(), mags.end());
  // Survival is (n - i) / n on [mags[i-1], mags[i]).
  const double n = static_cast<double>(mags.size());
  double value = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    value += std::sqrt((n - static_cast<double>(i)) / n) * (mags[i] - prev);
    prev = mags[i];
  }
  return {value, true};
}

double psi2_norm(std::span<const double> samples) {
  if (samples.size() < 1000) throw std::invalid_argument("psi2_norm: need at least 1000 samples");
  double max_sq = 0.0;
  double sum_sq = 0.0;
  for (double x : samples) {
    if (!std::isfinite(x)) throw std::invalid_argument("psi2_norm: non-finite sample");
    max_sq = std::max(max_sq, x * x);
    sum_sq += x * x;
  }
  if (max_sq == 0.0) return 0.0;
  const double log2 = std::numbers::ln2;
  const double count = static_cast<double>(samples.size());

  // log of mean exp(x^2/c^2), evaluated stably.
  auto log_criterion = [&](double c) {
    const double inv = 1.0 / (c * c);
    const double shift = max_sq * inv;
    double acc = 0.0;
    for (double x : samples) acc += std::exp(x * x * inv - shift);
    return shift + std::log(acc / count);
  };

  // The criterion decreases in c. Jensen gives criterion(lo) >= 2 and every
  // term is <= 2 at hi; expand anyway in case rounding puts us on the edge.
  double lo = std::sqrt(sum_sq / count / log2);
  double hi = std::sqrt(max_sq / log2);
  while (log_criterion(lo) <= log2 && lo > 0.0) lo *= 0.5;
  while (log_criterion(hi) > log2) hi *= 2.0;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (log_criterion(mid) > log2) lo = mid;
    else hi = mid;
  }
  return hi;
}

double coordinate_abs_moment(const DesignSpec& spec, double p) {
  validate(spec);
  if (!(p > 0.0)) throw std::invalid_argument("coordinate_abs_moment: p must be positive");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  switch (spec.kind) {
    case DesignKind::kRademacher:
      return 1.0;
    case DesignKind::kGaussian:
      return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / sqrt_pi;
    case DesignKind::kBoundedUniform:
      return std::pow(kSqrt3, p) / (p + 1.0);
    case DesignKind::kStudentT: {
      const double nu = spec.p;
      if (p >= nu) return kInf;
      const double log_raw = (p / 2.0) * std::log(nu) + std::lgamma((p + 1.0) / 2.0) +
                             std::lgamma((nu - p) / 2.0) - std::log(sqrt_pi) - std::lgamma(nu / 2.0);
      return std::pow(student_scale(nu), p) * std::exp(log_raw);
    }
    case DesignKind::kSymmetrizedPareto: {
      const double alpha = spec.p;
      if (p >= alpha) return kInf;
      return std::pow(pareto_scale(alpha), p) * alpha / (alpha - p);
    }
  }
  return kInf;
}

void validate(const CounterexampleSpec& spec) {
  if (spec.N < 100) throw std::invalid_argument("CounterexampleSpec: N must be at least 100");
}

double counterexample_second_moment(const CounterexampleSpec& spec) {
  validate(spec);
  const double n = static_cast<double>(spec.N);
  return 1.0 + 4.0 / n - 1.0 / (n * n);
}

double draw_counterexample(const CounterexampleSpec& spec, Engine& eng) {
  const double n = static_cast<double>(spec.N);
  const double sign = random_sign(eng);
  const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return u < 1.0 / (n * n) ? sign * 2.0 * std::sqrt(n) : sign;
}

Matrix sample_counterexample(const CounterexampleSpec& spec, std::size_t trials, std::uint64_t seed) {
  validate(spec);
  Matrix z(static_cast<Eigen::Index>(trials), static_cast<Eigen::Index>(spec.N));
  for (Eigen::Index j = 0; j < z.rows(); ++j) {
    Engine eng = make_engine(seed, StreamTag::kCounterexample, static_cast<std::uint64_t>(j));
    for (Eigen::Index i = 0; i < z.cols(); ++i) z(j, i) = draw_counterexample(spec, eng);
  }
  return z;
}

}  // namespace sbrisk
