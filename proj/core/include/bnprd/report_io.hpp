#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bnprd/report.hpp"

namespace bnprd {

enum class ReportFormat { Json, Csv };

std::string_view to_string(StatGroup g) noexcept;
StatGroup stat_group_from_string(std::string_view s);

/// Deterministic JSON; statistics in catalogue order, never-computable
/// summaries as null. report_from_json(report_to_json(r)) == r.
std::string report_to_json(const PosteriorReport& report);
PosteriorReport report_from_json(std::string_view json);

/// Two-group table: one row per label, columns for the non-treatment group,
/// the treatment group and cross-group statistics; cells are
/// "mean (lower, upper)" with two decimals, NA when absent.
std::string report_to_csv(const PosteriorReport& report);

void write_report(const PosteriorReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace bnprd
