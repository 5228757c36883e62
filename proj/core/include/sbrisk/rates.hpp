#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sbrisk {

/// Inputs of the closed-form rate calculators. The unnamed constants
/// c1..c7 default to 1; sigma is the L_{2,1} norm of the noise.
struct RateInputs {
  double N = 1.0;
  double n = 1.0;
  double R = 1.0;
  double sigma = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c4 = 1.0;
  double c5 = 1.0;
  double c6 = 1.0;
  double c7 = 1.0;
};

void validate(const RateInputs& in);

struct RhoRate {
  double value = 0.0;
  int branch = 1;  // 1: (R^2 / sqrt N) sqrt(log(2 c1 n / sqrt N)); 2: R^2 n / N
  std::vector<std::string> warnings;
};

struct VRates {
  double v1 = 0.0;
  double v2 = 0.0;
  double exponent = 0.0;  // c3 N v2 min(1 / sigma^2, 1 / R)
  int v1_branch = 1;      // 1: (R^2 / N) log(2 c1 n / N); 2: 0
  int v2_branch = 1;      // 1: (R sigma / sqrt N) sqrt(log(...)); 2: sigma^2 n / N
  std::vector<std::string> warnings;

  [[nodiscard]] double max() const { return v1 > v2 ? v1 : v2; }
};

/// Error rate of the subgaussian-complexity analysis: independent of sigma.
[[nodiscard]] RhoRate rho_N(const RateInputs& in);

/// Error rates of the small-ball analysis; v1 = 0 when N > c1 n, and
/// v2 = sigma^2 n / N when N > c2 n^2 sigma^2 / R^2. A log argument <= 1
/// clamps the log to 0 and records a warning.
[[nodiscard]] VRates v1_v2(const RateInputs& in);

/// C kappa sqrt(d log(e n / d)) for 1 <= d <= n.
[[nodiscard]] double lemma_dsum_bound(std::size_t n, std::size_t d, double kappa, double C = 1.0);

[[nodiscard]] nlohmann::json to_json(const RateInputs& in);
[[nodiscard]] nlohmann::json to_json(const RhoRate& rate);
[[nodiscard]] nlohmann::json to_json(const VRates& rates);

}  // namespace sbrisk
