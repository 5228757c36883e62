#include "sbrisk/report.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace sbrisk {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_cell(const nlohmann::json& cell) {
  if (cell.is_null()) return "";
  if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
  if (cell.is_number_integer() || cell.is_number_unsigned()) return cell.dump();
  if (cell.is_number_float()) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", cell.get<double>());
    return buf.data();
  }
  if (cell.is_string()) return csv_escape(cell.get<std::string>());
  throw std::invalid_argument("report cells must be scalars");
}

}  // namespace

void Report::add_row(std::vector<nlohmann::json> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument("report row has " + std::to_string(row.size()) + " cells, expected " +
                                std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw std::invalid_argument("unknown report format '" + std::string(name) + "' (expected csv or json)");
}

std::string content_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("content_hash: cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("content_hash: SHA-1 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string to_csv(const Report& report) {
  std::string out;
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    if (c > 0) out += ',';
    out += csv_escape(report.columns[c]);
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += csv_cell(row[c]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) rows.push_back(row);
  return {{"schema_version", kReportSchemaVersion},
          {"kind", report.kind},
          {"input_hash", content_hash(report.config.dump())},
          {"config", report.config},
          {"summary", report.summary},
          {"columns", report.columns},
          {"rows", std::move(rows)}};
}

Report report_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema_version", 0) != kReportSchemaVersion) {
    throw std::invalid_argument("report JSON has a missing or unsupported schema_version");
  }
  Report r;
  r.kind = j.at("kind").get<std::string>();
  r.config = j.at("config");
  r.summary = j.at("summary");
  r.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) r.add_row(row.get<std::vector<nlohmann::json>>());
  return r;
}

std::string format_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::kCsv) return to_csv(report);
  return to_json(report).dump(2) + '\n';
}

void emit_report(const Report& report, const std::filesystem::path& path, ReportFormat format) {
  const std::string text = format_report(report, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing report to '" + path.string() + "'");
}

}  // namespace sbrisk
