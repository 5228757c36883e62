#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sbrisk {

inline constexpr int kReportSchemaVersion = 1;

/// Tabular experiment output. Cells are JSON scalars (number, string, bool
/// or null); `config` echoes the resolved inputs and `summary` holds
/// run-level statistics.
struct Report {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json summary = nlohmann::json::object();

  /// Appends a row; throws if its width differs from the column count.
  void add_row(std::vector<nlohmann::json> row);
};

enum class ReportFormat { kCsv, kJson };

/// "csv" or "json"; throws std::invalid_argument otherwise.
[[nodiscard]] ReportFormat parse_format(std::string_view name);

/// Git blob hash (SHA-1 of "blob <size>\0" + content), lowercase hex.
[[nodiscard]] std::string content_hash(std::string_view content);

/// Header plus one line per row; floats use 17 significant digits.
[[nodiscard]] std::string to_csv(const Report& report);

/// {"schema_version", "kind", "input_hash", "config", "summary", "columns", "rows"}.
/// input_hash is the content hash of the compact config dump.
[[nodiscard]] nlohmann::json to_json(const Report& report);
[[nodiscard]] Report report_from_json(const nlohmann::json& j);

/// Serialized text in the given format (JSON is indented by 2, newline-terminated).
[[nodiscard]] std::string format_report(const Report& report, ReportFormat format);

/// Writes the report; I/O failures throw std::runtime_error naming the path.
void emit_report(const Report& report, const std::filesystem::path& path, ReportFormat format);

}  // namespace sbrisk
