#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bnprd/error.hpp"
#include "bnprd/report.hpp"
#include "bnprd/run_config.hpp"

namespace bnprd {

std::string_view version() noexcept;

/// Overrides the directory of the report path when set.
inline constexpr const char* kReportDirEnv = "BNPRD_REPORT_DIR";

/// 0 success, 2 config error, 3 data error (including unreadable files), 4 numerical failure.
int exit_code(ErrorCategory category) noexcept;

struct PreparedData {
    RDDataset data;
    std::vector<std::string> notes;
};

/// Loads the CSV, applies the assignment reduction and confounder scoring,
/// and sorts by r.
PreparedData prepare_dataset(const RunConfig& config);

/// Per-draw comparisons. Draws sharing a cluster share one entry of
/// `distinct`; draw i is distinct[sequence[i]].
struct PosteriorDraws {
    std::vector<ComparisonDraw> distinct;
    std::vector<std::uint32_t> sequence;
    std::size_t draws_total = 0;
    std::size_t dropped_min_side = 0;
    std::size_t weak_instrument_draws = 0;
    Diagnostics diagnostics;
};

PosteriorDraws collect_draws(const RDDataset& data, const RunConfig& config);

/// Chain, local inference and summary for an already prepared dataset.
PosteriorReport analyze(const RDDataset& data, const RunConfig& config, std::vector<std::string> notes = {});

std::filesystem::path resolve_report_path(const RunConfig& config);

struct RunOutcome {
    PosteriorReport report;
    std::filesystem::path report_file;
};

/// prepare_dataset -> analyze -> write_report.
RunOutcome run(const RunConfig& config);

}  // namespace bnprd
