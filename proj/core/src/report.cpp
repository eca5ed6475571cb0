#include "bnprd/report.hpp"

#include <algorithm>

#include "bnprd/error.hpp"
#include "bnprd/sampler.hpp"
#include "bnprd/special_fn.hpp"

namespace bnprd {

const StatEntry* PosteriorReport::find(std::string_view key) const {
    for (const auto& s : statistics) {
        if (s.key == key) return &s;
    }
    return nullptr;
}

PosteriorReport summarize(std::span<const ComparisonDraw> draws, double level) {
    std::vector<std::uint32_t> sequence(draws.size());
    for (std::size_t i = 0; i < sequence.size(); ++i) sequence[i] = static_cast<std::uint32_t>(i);
    return summarize(draws, sequence, level);
}

PosteriorReport summarize(std::span<const ComparisonDraw> distinct, std::span<const std::uint32_t> sequence,
                          double level) {
    if (sequence.empty()) throw Error(ErrorCode::NoDraws, "local_inference", "no posterior draws to summarize");
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "local_inference", "credible level must lie in (0, 1)");
    }
    const auto catalogue = statistic_catalogue();
    std::vector<std::vector<double>> columns(catalogue.size());
    std::vector<std::vector<std::optional<double>>> flat;
    flat.reserve(distinct.size());
    for (const auto& draw : distinct) flat.push_back(flatten(draw));
    for (std::uint32_t idx : sequence) {
        if (idx >= flat.size()) throw Error(ErrorCode::DomainError, "local_inference", "draw index out of range");
        const auto& values = flat[idx];
        for (std::size_t s = 0; s < values.size(); ++s) {
            if (values[s]) columns[s].push_back(*values[s]);
        }
    }

    PosteriorReport report;
    report.level = level;
    report.draws_total = sequence.size();
    report.draws_used = sequence.size();
    const double tail = 0.5 * (1.0 - level);
    for (std::size_t s = 0; s < catalogue.size(); ++s) {
        StatEntry e;
        e.key = catalogue[s].key;
        e.label = catalogue[s].label;
        e.group = catalogue[s].group;
        const auto& col = columns[s];
        e.computable_draws = col.size();
        e.computable_fraction = static_cast<double>(col.size()) / static_cast<double>(sequence.size());
        if (!col.empty()) {
            StatSummary sum;
            double total = 0.0;
            for (double v : col) total += v;
            sum.mean = total / static_cast<double>(col.size());
            std::vector<double> sorted = col;
            std::sort(sorted.begin(), sorted.end());
            sum.lower = sample_quantile(sorted, tail);
            sum.median = sample_quantile(sorted, 0.5);
            sum.upper = sample_quantile(sorted, 1.0 - tail);
            if (col.size() >= 100) {
                const McseResult mc = batch_means_mcse(col);
                sum.mcse = mc.mcse;
                sum.mc_half_width = mc.half_width;
            }
            e.summary = sum;
        }
        report.statistics.push_back(std::move(e));
    }
    return report;
}

}  // namespace bnprd
