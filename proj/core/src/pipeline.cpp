#include "bnprd/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

#include "bnprd/confounder_score.hpp"
#include "bnprd/csv_io.hpp"
#include "bnprd/local_inference.hpp"
#include "bnprd/report_io.hpp"
#include "bnprd/sampler.hpp"

#ifndef BNPRD_VERSION
#define BNPRD_VERSION "0.0.0"
#endif

namespace bnprd {
namespace {

constexpr const char* kModule = "cli";

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string_view version() noexcept { return BNPRD_VERSION; }

int exit_code(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::Config: return 2;
        case ErrorCategory::Data: return 3;
        case ErrorCategory::Io: return 3;
        case ErrorCategory::Numerical: return 4;
    }
    return 1;
}

PreparedData prepare_dataset(const RunConfig& config) {
    config.validate();
    const bool score = config.confounder.kind == ConfounderSource::Kind::Score;

    LoadOptions opts;
    opts.r_column = config.r_column;
    opts.y_column = config.y_column;
    opts.t_column = config.t_column;
    opts.id_column = config.id_column;
    opts.assignment = config.assignment;
    if (score) {
        opts.covariate_columns = config.confounder.covariates;
        opts.all_remaining_covariates = config.confounder.covariates.empty();
    } else {
        opts.x_column = config.confounder.column;
    }
    LoadedData loaded = load_csv(std::filesystem::path(config.input), opts);

    std::vector<std::string> notes;
    if (config.mode == DesignMode::Fuzzy && !loaded.has_treatment_column) {
        throw Error(ErrorCode::MissingColumn, kModule,
                    "fuzzy mode needs the treatment column '" + config.t_column + "'");
    }
    if (config.mode == DesignMode::Sharp) {
        if (loaded.has_treatment_column) {
            notes.push_back("Sharp mode: treatment column ignored; treatment set to 1(r >= cutoff).");
        }
        for (auto& s : loaded.subjects) s.t.reset();
    }

    if (score) {
        if (loaded.covariate_names.empty()) {
            throw Error(ErrorCode::MissingColumn, kModule, "confounder scoring found no covariate columns");
        }
        std::vector<double> r(loaded.subjects.size());
        std::vector<double> y(loaded.subjects.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] = loaded.subjects[i].r;
            y[i] = loaded.subjects[i].y;
        }
        const ScoreResult fit = score_covariates(loaded.covariates, r, config.cutoff, y, config.confounder.basis,
                                                 config.confounder.v);
        for (std::size_t i = 0; i < r.size(); ++i) loaded.subjects[i].x = fit.scores[i];
        for (std::size_t c : fit.dropped_columns) {
            notes.push_back("Confounder score: constant covariate '" + loaded.covariate_names[c] + "' dropped.");
        }
    }

    return {validate_and_sort(std::move(loaded.subjects), config.cutoff), std::move(notes)};
}

PosteriorDraws collect_draws(const RDDataset& data, const RunConfig& config) {
    ChainConfig chain = config.chain;
    chain.initial_blocks = config.initial_blocks.value_or(std::min<int>(10, static_cast<int>(data.size())));

    CompareOptions compare;
    compare.mode = config.mode;
    compare.fuzzy_tol = config.fuzzy_tol;
    compare.ks = config.exact_ks ? KsMethod::ExactPermutation : KsMethod::Asymptotic;

    const std::size_t i0 = anchor_index(data, config.cutoff);
    const auto min_side = static_cast<std::size_t>(config.min_side);

    PosteriorDraws out;
    // Comparisons depend on the draw only through the anchor's block.
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    std::vector<bool> kept;
    auto sink = [&](const OrderedPartition& p) {
        ++out.draws_total;
        const LocalCluster cluster = extract_cluster(p, i0, data);
        const std::uint64_t key = static_cast<std::uint64_t>(cluster.begin) << 32 | cluster.end;
        auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(out.distinct.size()));
        if (inserted) {
            out.distinct.push_back(compare_cluster(cluster, data, compare));
            kept.push_back(cluster.control_size() >= min_side && cluster.treated_size() >= min_side);
        }
        if (!kept[it->second]) {
            ++out.dropped_min_side;
            return;
        }
        if (out.distinct[it->second].weak_instrument) ++out.weak_instrument_draws;
        out.sequence.push_back(it->second);
    };
    out.diagnostics = run_chain(data, config.hyper, chain, sink);
    return out;
}

PosteriorReport analyze(const RDDataset& data, const RunConfig& config, std::vector<std::string> notes) {
    const PosteriorDraws draws = collect_draws(data, config);
    if (draws.sequence.empty()) {
        throw Error(ErrorCode::NoDraws, kModule,
                    "all " + std::to_string(draws.draws_total) + " draws were removed by min_side = " +
                        std::to_string(config.min_side));
    }
    PosteriorReport report = summarize(draws.distinct, draws.sequence, config.level);
    report.draws_total = draws.draws_total;
    report.draws_used = draws.sequence.size();

    const Diagnostics& d = draws.diagnostics;
    report.chain.steps = d.steps;
    report.chain.chains = d.chains;
    report.chain.split_acceptance = d.counters.acceptance_rate(MoveType::Split);
    report.chain.merge_acceptance = d.counters.acceptance_rate(MoveType::Merge);
    report.chain.shift_acceptance = d.counters.acceptance_rate(MoveType::Shift);
    report.chain.null_moves = d.counters.null_moves;
    report.chain.k_mean = d.k_mean;
    if (d.k_mcse) report.chain.k_mc_half_width = d.k_mcse->half_width;
    report.chain.k_effective_samples = d.k_effective_samples;

    report.metadata.software_version = std::string(version());
    report.metadata.seed = d.seed;
    report.metadata.rng_algorithm = d.rng_algorithm;
    report.metadata.data_digest = hex64(data.digest());
    report.metadata.config_digest = config.digest();
    report.metadata.config = config.echo();

    if (draws.dropped_min_side > 0) {
        notes.push_back(std::to_string(draws.dropped_min_side) + " of " + std::to_string(draws.draws_total) +
                        " draws dropped: cluster had fewer than " + std::to_string(config.min_side) +
                        " subjects on a side.");
    }
    if (config.mode == DesignMode::Fuzzy && draws.weak_instrument_draws > 0) {
        notes.push_back(std::to_string(draws.weak_instrument_draws) +
                        " draws flagged weak instrument: compliance difference below fuzzy_tol; "
                        "fuzzy effect not computed for them.");
    }
    notes.push_back(config.exact_ks
                        ? "KS p-values are exact permutation values when both sides have at most 10 "
                          "subjects and asymptotic otherwise."
                        : "KS p-values use the asymptotic Kolmogorov distribution and are approximate for "
                          "small clusters.");
    report.notes = std::move(notes);
    return report;
}

std::filesystem::path resolve_report_path(const RunConfig& config) {
    std::filesystem::path path(config.report_path);
    if (const char* dir = std::getenv(kReportDirEnv); dir != nullptr && *dir != '\0') {
        path = std::filesystem::path(dir) / path.filename();
    }
    return path;
}

RunOutcome run(const RunConfig& config) {
    PreparedData prepared = prepare_dataset(config);
    RunOutcome out;
    out.report = analyze(prepared.data, config, std::move(prepared.notes));
    out.report_file = resolve_report_path(config);
    write_report(out.report, config.format, out.report_file);
    return out;
}

}  // namespace bnprd
