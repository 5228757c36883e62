#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sbrisk/report.hpp"

namespace sbrisk {
namespace {

Report sample_report() {
  Report r;
  r.kind = "demo";
  r.columns = {"name", "value", "ok", "note"};
  r.add_row({"a,b", 0.1, true, nullptr});
  r.add_row({"plain", 1e-300, false, "say \"hi\""});
  r.add_row({"int", 42, true, ""});
  r.config = {{"seed", 24301}, {"n", 3}};
  r.summary = {{"count", 3}};
  return r;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Report, RowWidthIsChecked) {
  Report r;
  r.columns = {"a", "b"};
  EXPECT_THROW(r.add_row({1}), std::invalid_argument);
}

TEST(Report, EmptyReportIsHeaderOnlyCsv) {
  Report r;
  r.columns = {"x", "y"};
  EXPECT_EQ(to_csv(r), "x,y\n");
}

TEST(Report, CsvQuotingAndPrecision) {
  const std::string csv = to_csv(sample_report());
  EXPECT_EQ(csv,
            "name,value,ok,note\n"
            "\"a,b\",0.10000000000000001,true,\n"
            "plain,1e-300,false,\"say \"\"hi\"\"\"\n"
            "int,42,true,\n");
}

TEST(Report, JsonRoundTripIsByteIdentical) {
  const std::string first = format_report(sample_report(), ReportFormat::kJson);
  const Report back = report_from_json(nlohmann::json::parse(first));
  EXPECT_EQ(format_report(back, ReportFormat::kJson), first);
  EXPECT_EQ(first.back(), '\n');
  const auto j = nlohmann::json::parse(first);
  EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
  EXPECT_EQ(j.at("input_hash"), content_hash(sample_report().config.dump()));
}

TEST(Report, RejectsUnknownSchema) {
  EXPECT_THROW((void)report_from_json(nlohmann::json::parse(R"({"schema_version": 99})")), std::invalid_argument);
}

TEST(Report, ContentHashMatchesGitBlob) {
  EXPECT_EQ(content_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(content_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Report, FormatNames) {
  EXPECT_EQ(parse_format("csv"), ReportFormat::kCsv);
  EXPECT_EQ(parse_format("json"), ReportFormat::kJson);
  EXPECT_THROW((void)parse_format("xml"), std::invalid_argument);
}

TEST(Report, EmitWritesAndReportsFailures) {
  const auto dir = std::filesystem::temp_directory_path() / "sbrisk_report_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "r.csv";
  emit_report(sample_report(), path, ReportFormat::kCsv);
  EXPECT_EQ(read_file(path), to_csv(sample_report()));
  try {
    emit_report(sample_report(), dir / "missing" / "r.json", ReportFormat::kJson);
    FAIL() << "expected a write failure";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace sbrisk
