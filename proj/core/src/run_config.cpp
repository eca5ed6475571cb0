#include "bnprd/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bnprd/error.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "cli";

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, kModule, what); }

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double to_real(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        bad(std::string(key) + ": expected a number, got '" + s + "'");
    }
    return v;
}

template <class Int>
Int to_int(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        bad(std::string(key) + ": expected an integer, got '" + s + "'");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad(std::string(key) + ": expected true or false, got '" + s + "'");
}

std::vector<std::string> to_list(std::string_view text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> to_reals(std::string_view key, std::string_view text, std::size_t count) {
    std::vector<double> out;
    for (const auto& item : to_list(text)) out.push_back(to_real(key, item));
    if (out.size() != count) bad(std::string(key) + ": expected " + std::to_string(count) + " numbers");
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
    return out;
}

std::string real(double v) { return format_real(v); }

}  // namespace

std::string_view to_string(DesignMode m) noexcept { return m == DesignMode::Sharp ? "sharp" : "fuzzy"; }

std::string_view to_string(PriorVariant v) noexcept {
    switch (v) {
        case PriorVariant::Normalized: return "normalized";
        case PriorVariant::PrintedN: return "printed_n";
        case PriorVariant::AlphaTimesK: return "alpha_times_k";
    }
    return "normalized";
}

std::string_view to_string(ReportFormat f) noexcept { return f == ReportFormat::Json ? "json" : "csv"; }

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
    const std::string value = trim(raw);
    const std::string k(key);
    if (k == "data.input") c.input = value;
    else if (k == "data.cutoff") c.cutoff = to_real(k, value);
    else if (k == "data.mode") {
        if (value == "sharp") c.mode = DesignMode::Sharp;
        else if (value == "fuzzy") c.mode = DesignMode::Fuzzy;
        else bad(k + ": expected sharp or fuzzy");
    }
    else if (k == "data.r_column") c.r_column = value;
    else if (k == "data.y_column") c.y_column = value;
    else if (k == "data.t_column") c.t_column = value;
    else if (k == "data.id_column") c.id_column = value;
    else if (k == "assignment.min_of") {
        auto cols = to_list(value);
        if (cols.empty()) c.assignment.reset();
        else {
            if (!c.assignment) c.assignment.emplace();
            c.assignment->columns = std::move(cols);
        }
    }
    else if (k == "assignment.offset") {
        if (!c.assignment) c.assignment.emplace();
        c.assignment->offset = to_real(k, value);
    }
    else if (k == "assignment.scale") {
        if (!c.assignment) c.assignment.emplace();
        c.assignment->scale = to_real(k, value);
    }
    else if (k == "confounder.source") {
        if (value == "column") c.confounder.kind = ConfounderSource::Kind::Column;
        else if (value == "score") c.confounder.kind = ConfounderSource::Kind::Score;
        else bad(k + ": expected column or score");
    }
    else if (k == "confounder.column") c.confounder.column = value;
    else if (k == "confounder.covariates") c.confounder.covariates = value == "*" ? std::vector<std::string>{} : to_list(value);
    else if (k == "confounder.basis") {
        if (value == "linear") c.confounder.basis.kind = BasisSpec::Kind::Linear;
        else if (value == "polynomial") c.confounder.basis.kind = BasisSpec::Kind::Polynomial;
        else bad(k + ": expected linear or polynomial");
    }
    else if (k == "confounder.degree") c.confounder.basis.degree = to_int<int>(k, value);
    else if (k == "confounder.v") c.confounder.v = to_real(k, value);
    else if (k == "prior.alpha") c.hyper.alpha = to_real(k, value);
    else if (k == "prior.beta0") {
        const auto v = to_reals(k, value, 2);
        c.hyper.beta0 << v[0], v[1];
    }
    else if (k == "prior.C") {
        const auto v = to_reals(k, value, 4);
        c.hyper.C << v[0], v[1], v[2], v[3];
    }
    else if (k == "prior.a") c.hyper.a = to_real(k, value);
    else if (k == "prior.b") c.hyper.b = to_real(k, value);
    else if (k == "prior.variant") {
        if (value == "normalized") c.chain.prior = PriorVariant::Normalized;
        else if (value == "printed_n") c.chain.prior = PriorVariant::PrintedN;
        else if (value == "alpha_times_k") c.chain.prior = PriorVariant::AlphaTimesK;
        else bad(k + ": expected normalized, printed_n or alpha_times_k");
    }
    else if (k == "chain.iterations") c.chain.iterations = to_int<std::int64_t>(k, value);
    else if (k == "chain.burn_in") c.chain.burn_in = to_int<std::int64_t>(k, value);
    else if (k == "chain.thin") c.chain.thin = to_int<std::int64_t>(k, value);
    else if (k == "chain.seed") c.chain.seed = to_int<std::uint64_t>(k, value);
    else if (k == "chain.initial_blocks") c.initial_blocks = to_int<int>(k, value);
    else if (k == "chain.shift_move") c.chain.enable_shift_move = to_bool(k, value);
    else if (k == "chain.chains") c.chain.chains = to_int<int>(k, value);
    else if (k == "chain.debug_check") c.chain.debug_check = to_bool(k, value);
    else if (k == "chain.trace_dir") {
        if (value.empty()) c.chain.trace_dir.reset();
        else c.chain.trace_dir = value;
    }
    else if (k == "inference.min_side") c.min_side = to_int<int>(k, value);
    else if (k == "inference.level") c.level = to_real(k, value);
    else if (k == "inference.fuzzy_tol") c.fuzzy_tol = to_real(k, value);
    else if (k == "inference.exact_ks") c.exact_ks = to_bool(k, value);
    else if (k == "report.path") c.report_path = value;
    else if (k == "report.format") {
        if (value == "json") c.format = ReportFormat::Json;
        else if (value == "csv") c.format = ReportFormat::Csv;
        else bad(k + ": expected json or csv");
    }
    else bad("unknown setting '" + k + "'");
}

void RunConfig::validate() const {
    if (input.empty()) bad("data.input is required");
    if (assignment) {
        if (assignment->columns.empty()) bad("assignment.min_of needs at least one column");
        if (!(assignment->scale != 0.0)) bad("assignment.scale must be non-zero");
    }
    if (confounder.kind == ConfounderSource::Kind::Column && confounder.column.empty()) {
        bad("confounder.column must name a column");
    }
    if (confounder.kind == ConfounderSource::Kind::Score) {
        if (!(confounder.v > 0.0)) bad("confounder.v must be positive");
        if (confounder.basis.kind == BasisSpec::Kind::Polynomial && confounder.basis.degree < 1) {
            bad("confounder.degree must be at least 1");
        }
    }
    hyper.validate();
    if (chain.iterations < 1) bad("chain.iterations must be positive");
    if (chain.burn_in < 0 || chain.burn_in >= chain.iterations) bad("chain.burn_in must lie in [0, iterations)");
    if (chain.thin < 1) bad("chain.thin must be positive");
    if (chain.chains < 1) bad("chain.chains must be positive");
    if (initial_blocks && *initial_blocks < 1) bad("chain.initial_blocks must be positive");
    if (min_side < 0) bad("inference.min_side must be non-negative");
    if (!(level > 0.0 && level < 1.0)) bad("inference.level must lie in (0, 1)");
    if (!(fuzzy_tol >= 0.0)) bad("inference.fuzzy_tol must be non-negative");
    if (report_path.empty()) bad("report.path is required");
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> e;
    auto put = [&](std::string k, std::string v) { e.emplace_back(std::move(k), std::move(v)); };
    put("data.input", input);
    put("data.cutoff", real(cutoff));
    put("data.mode", std::string(to_string(mode)));
    put("data.r_column", r_column);
    put("data.y_column", y_column);
    put("data.t_column", t_column);
    put("data.id_column", id_column);
    if (assignment) {
        put("assignment.min_of", join(assignment->columns));
        put("assignment.offset", real(assignment->offset));
        put("assignment.scale", real(assignment->scale));
    }
    const bool score = confounder.kind == ConfounderSource::Kind::Score;
    put("confounder.source", score ? "score" : "column");
    if (score) {
        put("confounder.covariates", confounder.covariates.empty() ? "*" : join(confounder.covariates));
        put("confounder.basis", confounder.basis.kind == BasisSpec::Kind::Linear ? "linear" : "polynomial");
        put("confounder.degree", std::to_string(confounder.basis.degree));
        put("confounder.v", real(confounder.v));
    } else {
        put("confounder.column", confounder.column);
    }
    put("prior.alpha", real(hyper.alpha));
    put("prior.beta0", real(hyper.beta0(0)) + "," + real(hyper.beta0(1)));
    put("prior.C", real(hyper.C(0, 0)) + "," + real(hyper.C(0, 1)) + "," + real(hyper.C(1, 0)) + "," +
                       real(hyper.C(1, 1)));
    put("prior.a", real(hyper.a));
    put("prior.b", real(hyper.b));
    put("prior.variant", std::string(to_string(chain.prior)));
    put("chain.iterations", std::to_string(chain.iterations));
    put("chain.burn_in", std::to_string(chain.burn_in));
    put("chain.thin", std::to_string(chain.thin));
    put("chain.seed", std::to_string(chain.seed));
    put("chain.initial_blocks", initial_blocks ? std::to_string(*initial_blocks) : "auto");
    put("chain.shift_move", chain.enable_shift_move ? "true" : "false");
    put("chain.chains", std::to_string(chain.chains));
    put("chain.debug_check", chain.debug_check ? "true" : "false");
    put("inference.min_side", std::to_string(min_side));
    put("inference.level", real(level));
    put("inference.fuzzy_tol", real(fuzzy_tol));
    put("inference.exact_ks", exact_ks ? "true" : "false");
    put("report.format", std::string(to_string(format)));
    // Output locations (report path, trace dir) do not affect any number and are left out.
    return e;
}

std::string RunConfig::digest() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& [k, v] : echo()) {
        for (char ch : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        bad(std::string("config syntax: ") + e.what());
    }
    RunConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty()) bad("setting '" + section + "' must sit inside a section");
        for (const auto& [key, leaf] : body) apply_setting(c, section + "." + key, leaf.data());
    }
    auto resolve = [&](std::string& p) {
        if (!p.empty() && !base_dir.empty() && std::filesystem::path(p).is_relative()) {
            p = (base_dir / p).lexically_normal().string();
        }
    };
    resolve(c.input);
    resolve(c.report_path);
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, kModule, "cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), path.parent_path());
}

}  // namespace bnprd
