#include "bnprd/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "bnprd/error.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "cli";
constexpr const char* kFormatTag = "bnprd-report/1";

using Json = nlohmann::ordered_json;

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
}

std::string csv_cell(const StatEntry* e) {
    if (e == nullptr || !e->summary) return "NA";
    char buf[128];
    std::snprintf(buf, sizeof buf, "\"%.2f (%.2f, %.2f)\"", e->summary->mean, e->summary->lower,
                  e->summary->upper);
    return buf;
}

}  // namespace

std::string_view to_string(StatGroup g) noexcept {
    switch (g) {
        case StatGroup::NonTreatment: return "non_treatment";
        case StatGroup::Treatment: return "treatment";
        case StatGroup::Cross: return "cross_group";
    }
    return "cross_group";
}

StatGroup stat_group_from_string(std::string_view s) {
    if (s == "non_treatment") return StatGroup::NonTreatment;
    if (s == "treatment") return StatGroup::Treatment;
    if (s == "cross_group") return StatGroup::Cross;
    throw Error(ErrorCode::ParseError, kModule, "unknown statistic group '" + std::string(s) + "'");
}

std::string report_to_json(const PosteriorReport& report) {
    Json root;
    root["format"] = kFormatTag;
    root["level"] = report.level;
    root["draws"] = {{"total", report.draws_total}, {"used", report.draws_used}};

    Json stats = Json::array();
    for (const auto& e : report.statistics) {
        Json s;
        s["key"] = e.key;
        s["label"] = e.label;
        s["group"] = to_string(e.group);
        if (e.summary) {
            s["mean"] = e.summary->mean;
            s["lo"] = e.summary->lower;
            s["median"] = e.summary->median;
            s["hi"] = e.summary->upper;
            s["mcse"] = optional_number(e.summary->mcse);
            s["mc_half_width"] = optional_number(e.summary->mc_half_width);
        } else {
            for (const char* k : {"mean", "lo", "median", "hi", "mcse", "mc_half_width"}) s[k] = nullptr;
        }
        s["computable_draws"] = e.computable_draws;
        s["computable_fraction"] = e.computable_fraction;
        stats.push_back(std::move(s));
    }
    root["statistics"] = std::move(stats);

    const ChainSummary& c = report.chain;
    root["chain"] = {{"steps", c.steps},
                     {"chains", c.chains},
                     {"split_acceptance", c.split_acceptance},
                     {"merge_acceptance", c.merge_acceptance},
                     {"shift_acceptance", c.shift_acceptance},
                     {"null_moves", c.null_moves},
                     {"k_mean", c.k_mean},
                     {"k_mc_half_width", optional_number(c.k_mc_half_width)},
                     {"k_effective_samples", c.k_effective_samples}};

    const RunMetadata& m = report.metadata;
    Json config = Json::array();
    for (const auto& [k, v] : m.config) config.push_back({{"key", k}, {"value", v}});
    root["metadata"] = {{"software_version", m.software_version},
                        {"seed", m.seed},
                        {"rng_algorithm", m.rng_algorithm},
                        {"data_digest", m.data_digest},
                        {"config_digest", m.config_digest},
                        {"config", std::move(config)}};
    root["notes"] = report.notes;
    return root.dump(2) + "\n";
}

PosteriorReport report_from_json(std::string_view text) {
    try {
        const Json root = Json::parse(text);
        if (root.value("format", "") != kFormatTag) {
            throw Error(ErrorCode::ParseError, kModule, "not a bnprd report");
        }
        PosteriorReport r;
        r.level = root.at("level").get<double>();
        r.draws_total = root.at("draws").at("total").get<std::size_t>();
        r.draws_used = root.at("draws").at("used").get<std::size_t>();
        for (const auto& s : root.at("statistics")) {
            StatEntry e;
            e.key = s.at("key").get<std::string>();
            e.label = s.at("label").get<std::string>();
            e.group = stat_group_from_string(s.at("group").get<std::string>());
            if (!s.at("mean").is_null()) {
                StatSummary sum;
                sum.mean = s.at("mean").get<double>();
                sum.lower = s.at("lo").get<double>();
                sum.median = s.at("median").get<double>();
                sum.upper = s.at("hi").get<double>();
                sum.mcse = read_optional(s, "mcse");
                sum.mc_half_width = read_optional(s, "mc_half_width");
                e.summary = sum;
            }
            e.computable_draws = s.at("computable_draws").get<std::size_t>();
            e.computable_fraction = s.at("computable_fraction").get<double>();
            r.statistics.push_back(std::move(e));
        }
        const Json& c = root.at("chain");
        r.chain.steps = c.at("steps").get<std::int64_t>();
        r.chain.chains = c.at("chains").get<int>();
        r.chain.split_acceptance = c.at("split_acceptance").get<double>();
        r.chain.merge_acceptance = c.at("merge_acceptance").get<double>();
        r.chain.shift_acceptance = c.at("shift_acceptance").get<double>();
        r.chain.null_moves = c.at("null_moves").get<std::int64_t>();
        r.chain.k_mean = c.at("k_mean").get<double>();
        r.chain.k_mc_half_width = read_optional(c, "k_mc_half_width");
        r.chain.k_effective_samples = c.at("k_effective_samples").get<double>();

        const Json& m = root.at("metadata");
        r.metadata.software_version = m.at("software_version").get<std::string>();
        r.metadata.seed = m.at("seed").get<std::uint64_t>();
        r.metadata.rng_algorithm = m.at("rng_algorithm").get<std::string>();
        r.metadata.data_digest = m.at("data_digest").get<std::string>();
        r.metadata.config_digest = m.at("config_digest").get<std::string>();
        for (const auto& kv : m.at("config")) {
            r.metadata.config.emplace_back(kv.at("key").get<std::string>(), kv.at("value").get<std::string>());
        }
        r.notes = root.at("notes").get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, kModule, std::string("malformed report: ") + e.what());
    }
}

std::string report_to_csv(const PosteriorReport& report) {
    // Rows keep the order in which labels first appear in the catalogue.
    std::vector<std::string> labels;
    std::map<std::string, std::map<StatGroup, const StatEntry*>> cells;
    for (const auto& e : report.statistics) {
        auto [it, inserted] = cells.try_emplace(e.label);
        if (inserted) labels.push_back(e.label);
        it->second[e.group] = &e;
    }
    auto pick = [&](const std::string& label, StatGroup g) -> const StatEntry* {
        const auto& row = cells.at(label);
        const auto it = row.find(g);
        return it == row.end() ? nullptr : it->second;
    };

    std::ostringstream out;
    out << "statistic,non_treatment,treatment,cross_group\n";
    for (const auto& label : labels) {
        out << label << ',' << csv_cell(pick(label, StatGroup::NonTreatment)) << ','
            << csv_cell(pick(label, StatGroup::Treatment)) << ',' << csv_cell(pick(label, StatGroup::Cross))
            << '\n';
    }
    return out.str();
}

void write_report(const PosteriorReport& report, ReportFormat format, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, kModule, "cannot write " + path.string());
    out << (format == ReportFormat::Json ? report_to_json(report) : report_to_csv(report));
    if (!out) throw Error(ErrorCode::IoError, kModule, "write failed for " + path.string());
}

}  // namespace bnprd
