#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sbrisk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStatistical = 3;

/// Subcommand names in help order.
[[nodiscard]] const std::vector<std::string>& subcommands();

/// Default configuration of a subcommand; every accepted key appears here.
[[nodiscard]] nlohmann::json default_config(const std::string& subcommand);

/// Thrown for invalid configuration; mapped to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Merges `overlay` into `base` key by key. Unknown keys and values whose
/// JSON type differs from the default throw ConfigError naming the dotted
/// key. Distribution records ("design", "noise") are replaced whole and
/// validated later.
void merge_strict(nlohmann::json& base, const nlohmann::json& overlay, const std::string& prefix = "");

/// Applies "a.b=value"; the value is parsed as JSON when possible and taken
/// as a string otherwise.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Full command line (without the program name). Writes the one-line
/// summary to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbrisk::cli
