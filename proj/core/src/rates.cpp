#include "sbrisk/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace sbrisk {

namespace {

// log(x) clamped at 0, with a warning when the clamp applies.
double clamped_log(double x, const char* name, std::vector<std::string>& warnings) {
  if (x <= 1.0) {
    warnings.emplace_back(std::string(name) + ": log argument <= 1, clamped to 0 (branch mismatch)");
    return 0.0;
  }
  return std::log(x);
}

}  // namespace

void validate(const RateInputs& in) {
  if (!(in.N >= 1.0) || !(in.n >= 1.0)) throw std::invalid_argument("rates: N and n must be >= 1");
  if (!(in.R > 0.0)) throw std::invalid_argument("rates: R must be positive");
  if (!(in.sigma >= 0.0)) throw std::invalid_argument("rates: sigma must be >= 0");
  for (double c : {in.c1, in.c2, in.c3, in.c4, in.c5, in.c6, in.c7}) {
    if (!(c > 0.0)) throw std::invalid_argument("rates: constants must be positive");
  }
  for (double v : {in.N, in.n, in.R, in.sigma}) {
    if (!std::isfinite(v)) throw std::invalid_argument("rates: inputs must be finite");
  }
}

RhoRate rho_N(const RateInputs& in) {
  validate(in);
  RhoRate out;
  const double root_n = std::sqrt(in.N);
  if (in.N <= in.c1 * in.n * in.n) {
    out.branch = 1;
    const double lg = clamped_log(2.0 * in.c1 * in.n / root_n, "rho_N", out.warnings);
    out.value = in.R * in.R / root_n * std::sqrt(lg);
  } else {
    out.branch = 2;
    out.value = in.R * in.R * in.n / in.N;
  }
  return out;
}

VRates v1_v2(const RateInputs& in) {
  validate(in);
  VRates out;
  if (in.N <= in.c1 * in.n) {
    out.v1_branch = 1;
    out.v1 = in.R * in.R / in.N * clamped_log(2.0 * in.c1 * in.n / in.N, "v1", out.warnings);
  } else {
    out.v1_branch = 2;
    out.v1 = 0.0;
  }

  const double root_n = std::sqrt(in.N);
  if (in.sigma == 0.0) {
    out.v2_branch = 2;
    out.v2 = 0.0;
  } else if (in.N <= in.c2 * in.n * in.n * in.sigma * in.sigma / (in.R * in.R)) {
    out.v2_branch = 1;
    const double lg = clamped_log(2.0 * in.c2 * in.n * in.sigma / (root_n * in.R), "v2", out.warnings);
    out.v2 = in.R * in.sigma / root_n * std::sqrt(lg);
  } else {
    out.v2_branch = 2;
    out.v2 = in.sigma * in.sigma * in.n / in.N;
  }

  const double inv_r = 1.0 / in.R;
  const double scale = in.sigma == 0.0 ? inv_r : std::min(1.0 / (in.sigma * in.sigma), inv_r);
  out.exponent = in.c3 * in.N * out.v2 * scale;
  return out;
}

double lemma_dsum_bound(std::size_t n, std::size_t d, double kappa, double C) {
  if (d < 1 || d > n) throw std::out_of_range("lemma_dsum_bound: d must lie in [1, n]");
  if (!(kappa >= 0.0) || !(C > 0.0)) throw std::invalid_argument("lemma_dsum_bound: need kappa >= 0 and C > 0");
  const double dd = static_cast<double>(d);
  const double ratio = static_cast<double>(n) / dd;
  // log(e n / d) = 1 + log(n / d), exact at d = n.
  return C * kappa * std::sqrt(dd * (1.0 + std::log(ratio)));
}

nlohmann::json to_json(const RateInputs& in) {
  return {{"N", in.N}, {"n", in.n}, {"R", in.R}, {"sigma", in.sigma}, {"c1", in.c1}, {"c2", in.c2},
          {"c3", in.c3}, {"c4", in.c4}, {"c5", in.c5}, {"c6", in.c6}, {"c7", in.c7}};
}

nlohmann::json to_json(const RhoRate& rate) {
  return {{"rho_N", rate.value}, {"branch", rate.branch}, {"warnings", rate.warnings}};
}

nlohmann::json to_json(const VRates& r) {
  return {{"v1", r.v1},
          {"v2", r.v2},
          {"max", r.max()},
          {"exponent", r.exponent},
          {"v1_branch", r.v1_branch},
          {"v2_branch", r.v2_branch},
          {"warnings", r.warnings}};
}

}  // namespace sbrisk
