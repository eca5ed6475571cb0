#include "bnprd/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "bnprd/error.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "cli";

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? field : trim(field));
            field.clear();
            was_quoted = false;
        } else {
            field += c;
        }
    }
    if (quoted) {
        throw Error(ErrorCode::ParseError, kModule, "line " + std::to_string(line_no) + ": unterminated quote");
    }
    fields.push_back(was_quoted ? field : trim(field));
    return fields;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& column, const std::string& what) {
    throw Error(ErrorCode::ParseError, kModule,
                "line " + std::to_string(line) + ", column '" + column + "': " + what);
}

double parse_real(const std::string& cell, std::size_t line, const std::string& column) {
    if (cell.empty()) parse_error(line, column, "missing value");
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) parse_error(line, column, "not a number: '" + cell + "'");
    if (!std::isfinite(v)) parse_error(line, column, "non-finite value");
    return v;
}

bool parse_binary(const std::string& cell, std::size_t line, const std::string& column) {
    if (cell == "1" || cell == "1.0" || cell == "true" || cell == "TRUE") return true;
    if (cell == "0" || cell == "0.0" || cell == "false" || cell == "FALSE") return false;
    parse_error(line, column, "treatment must be 0 or 1, got '" + cell + "'");
}

}  // namespace

std::optional<std::size_t> CsvTable::find_column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

std::size_t CsvTable::column(const std::string& name) const {
    if (auto c = find_column(name)) return *c;
    throw Error(ErrorCode::MissingColumn, kModule, "missing column '" + name + "'");
}

CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_line(line, line_no);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw Error(ErrorCode::ParseError, kModule,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty()) throw Error(ErrorCode::EmptyInput, kModule, "CSV has no header row");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, kModule, "cannot open " + path.string());
    return parse_csv(in);
}

LoadedData load_csv(const CsvTable& table, const LoadOptions& options) {
    std::set<std::string> claimed{options.y_column, options.t_column, options.id_column};

    std::optional<std::size_t> r_col;
    std::vector<std::size_t> assign_cols;
    if (options.assignment) {
        if (options.assignment->columns.empty()) {
            throw Error(ErrorCode::InvalidConfig, kModule, "assignment reduction needs columns");
        }
        if (!(options.assignment->scale != 0.0)) {
            throw Error(ErrorCode::InvalidConfig, kModule, "assignment scale must be non-zero");
        }
        for (const auto& c : options.assignment->columns) {
            assign_cols.push_back(table.column(c));
            claimed.insert(c);
        }
    } else {
        r_col = table.column(options.r_column);
        claimed.insert(options.r_column);
    }
    const std::size_t y_col = table.column(options.y_column);
    const auto t_col = table.find_column(options.t_column);
    const auto id_col = table.find_column(options.id_column);
    std::optional<std::size_t> x_col;
    if (options.x_column) {
        x_col = table.column(*options.x_column);
        claimed.insert(*options.x_column);
    }

    LoadedData out;
    out.has_treatment_column = t_col.has_value();
    std::vector<std::size_t> cov_cols;
    if (options.all_remaining_covariates) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (!claimed.contains(table.header[c])) {
                cov_cols.push_back(c);
                out.covariate_names.push_back(table.header[c]);
            }
        }
    } else {
        for (const auto& name : options.covariate_columns) {
            cov_cols.push_back(table.column(name));
            out.covariate_names.push_back(name);
        }
    }

    std::set<std::string> ids;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        RawSubject s;
        s.id = id_col ? row[*id_col] : "row" + std::to_string(line);
        if (!ids.insert(s.id).second) {
            throw Error(ErrorCode::DuplicateId, kModule, "duplicate id '" + s.id + "' on line " + std::to_string(line));
        }
        if (r_col) {
            s.r = parse_real(row[*r_col], line, table.header[*r_col]);
        } else {
            double lowest = std::numeric_limits<double>::infinity();
            for (std::size_t c : assign_cols) lowest = std::min(lowest, parse_real(row[c], line, table.header[c]));
            s.r = (lowest - options.assignment->offset) / options.assignment->scale;
        }
        s.y = parse_real(row[y_col], line, table.header[y_col]);
        if (x_col) s.x = parse_real(row[*x_col], line, table.header[*x_col]);
        if (t_col) s.t = parse_binary(row[*t_col], line, table.header[*t_col]);

        std::vector<double> cov;
        cov.reserve(cov_cols.size());
        for (std::size_t c : cov_cols) cov.push_back(parse_real(row[c], line, table.header[c]));
        out.covariates.push_back(std::move(cov));
        out.subjects.push_back(std::move(s));
    }
    if (out.subjects.empty()) throw Error(ErrorCode::EmptyInput, kModule, "CSV has no data rows");
    return out;
}

LoadedData load_csv(const std::filesystem::path& path, const LoadOptions& options) {
    return load_csv(read_csv(path), options);
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_dataset_csv(std::ostream& out, const RDDataset& data) {
    out << "id,r,x,y,t\n";
    for (const auto& s : data.subjects()) {
        out << s.id << ',' << format_real(s.r) << ',' << format_real(s.x) << ',' << format_real(s.y) << ','
            << (s.t ? 1 : 0) << '\n';
    }
}

void write_dataset_csv(const std::filesystem::path& path, const RDDataset& data) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, kModule, "cannot write " + path.string());
    write_dataset_csv(out, data);
    if (!out) throw Error(ErrorCode::IoError, kModule, "write failed for " + path.string());
}

}  // namespace bnprd
