#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bnprd/confounder_score.hpp"
#include "bnprd/csv_io.hpp"
#include "bnprd/local_inference.hpp"
#include "bnprd/partition_model.hpp"
#include "bnprd/report_io.hpp"
#include "bnprd/sampler.hpp"

namespace bnprd {

struct ConfounderSource {
    enum class Kind { Column, Score };
    Kind kind = Kind::Column;
    std::string column = "x";
    /// Score only: covariate columns, or every unclaimed column when empty.
    std::vector<std::string> covariates;
    BasisSpec basis;
    double v = 1000.0;
};

/// Settings for one analysis. Files use INI syntax with sections
/// [data] [assignment] [confounder] [prior] [chain] [inference] [report];
/// see apply_setting for the keys.
struct RunConfig {
    std::string input;
    double cutoff = 0.0;
    DesignMode mode = DesignMode::Sharp;
    std::string r_column = "r";
    std::string y_column = "y";
    std::string t_column = "t";
    std::string id_column = "id";
    std::optional<AssignmentReduction> assignment;
    ConfounderSource confounder;
    Hyperparameters hyper;
    ChainConfig chain;
    /// Unset means min(10, n).
    std::optional<int> initial_blocks;
    std::string report_path = "report.json";
    ReportFormat format = ReportFormat::Json;
    int min_side = 1;
    double level = 0.95;
    double fuzzy_tol = 0.05;
    bool exact_ks = false;

    /// Throws InvalidConfig.
    void validate() const;

    /// Every setting as (section.key, value) in a fixed order.
    std::vector<std::pair<std::string, std::string>> echo() const;
    /// FNV-1a over the echo, as 16 hex digits.
    std::string digest() const;
};

/// Sets one "section.key" to a textual value. Throws InvalidConfig on an
/// unknown key or an unparseable value.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Parses INI text on top of the defaults. Relative input and report paths
/// resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

std::string_view to_string(DesignMode m) noexcept;
std::string_view to_string(PriorVariant v) noexcept;
std::string_view to_string(ReportFormat f) noexcept;

}  // namespace bnprd
