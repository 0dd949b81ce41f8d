#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "behave/experiment.hpp"

namespace behave {

struct EmitOptions {
  bool json = true;
  bool markdown = true;
  bool csv = true;
};

/// Writes report.json, report.md, figure CSVs, the significance table and
/// Δp tables into `dir`, then manifest.json. `run_info` (timestamps, thread
/// counts) goes to the manifest only, never into the report body.
/// Returns the files written, relative to `dir`.
std::vector<std::string> emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                                     const EmitOptions& options = {},
                                     const nlohmann::json& run_info = nlohmann::json::object());

std::string render_markdown(const ExperimentReport& report);

/// Table-style p-value: "<.001" below 0.001, otherwise three decimals
/// without the leading zero.
std::string format_p_value(double p);

/// Standalone significance table: one row per test with the compared
/// approaches, test set, metric and p-value.
nlohmann::json significance_table(const ExperimentReport& report);

struct VerifyResult {
  std::size_t checked = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// Recomputes every metric, aggregate, significance test and Δp table of a
/// written report from its persisted predictions, plans and gold files.
VerifyResult verify_report(const std::filesystem::path& dir);

}  // namespace behave
