#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bnprd/confounder_score.hpp"
#include "bnprd/dataset.hpp"

namespace bnprd {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line of each row

    /// Throws MissingColumn.
    std::size_t column(const std::string& name) const;
    std::optional<std::size_t> find_column(const std::string& name) const;
};

/// Comma-separated with a header row; double quotes may wrap a field.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// r = (min over `columns` - offset) / scale.
struct AssignmentReduction {
    std::vector<std::string> columns;
    double offset = 0.0;
    double scale = 1.0;
};

struct LoadOptions {
    std::string r_column = "r";
    std::string y_column = "y";
    std::string t_column = "t";
    std::string id_column = "id";
    /// Confounder column; when unset x is left at zero for later scoring.
    std::optional<std::string> x_column;
    std::vector<std::string> covariate_columns;
    /// Use every column not otherwise claimed as a covariate.
    bool all_remaining_covariates = false;
    std::optional<AssignmentReduction> assignment;
};

struct LoadedData {
    std::vector<RawSubject> subjects;
    CovariateRows covariates;
    std::vector<std::string> covariate_names;
    bool has_treatment_column = false;
};

/// Throws MissingColumn, ParseError (with line and column) or DuplicateId.
LoadedData load_csv(const CsvTable& table, const LoadOptions& options);
LoadedData load_csv(const std::filesystem::path& path, const LoadOptions& options);

/// Writes id,r,x,y,t in r order; load_csv reads it back.
void write_dataset_csv(std::ostream& out, const RDDataset& data);
void write_dataset_csv(const std::filesystem::path& path, const RDDataset& data);

/// Shortest decimal form that parses back to the same double.
std::string format_real(double v);

}  // namespace bnprd
