#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnprd/local_inference.hpp"

namespace bnprd {

struct StatSummary {
    double mean = 0.0;
    double lower = 0.0;
    double median = 0.0;
    double upper = 0.0;
    /// Batch-means MC error; present when at least 100 draws were computable.
    std::optional<double> mcse;
    std::optional<double> mc_half_width;

    bool operator==(const StatSummary&) const = default;
};

struct StatEntry {
    std::string key;
    std::string label;
    StatGroup group = StatGroup::Cross;
    std::optional<StatSummary> summary;  // absent when no draw was computable
    std::size_t computable_draws = 0;
    double computable_fraction = 0.0;

    bool operator==(const StatEntry&) const = default;
};

struct ChainSummary {
    std::int64_t steps = 0;
    int chains = 1;
    double split_acceptance = 0.0;
    double merge_acceptance = 0.0;
    double shift_acceptance = 0.0;
    std::int64_t null_moves = 0;
    double k_mean = 0.0;
    std::optional<double> k_mc_half_width;
    double k_effective_samples = 0.0;

    bool operator==(const ChainSummary&) const = default;
};

struct RunMetadata {
    std::string software_version;
    std::uint64_t seed = 0;
    std::string rng_algorithm;
    std::string data_digest;
    std::string config_digest;
    std::vector<std::pair<std::string, std::string>> config;

    bool operator==(const RunMetadata&) const = default;
};

struct PosteriorReport {
    double level = 0.95;
    std::size_t draws_total = 0;
    std::size_t draws_used = 0;
    std::vector<StatEntry> statistics;
    ChainSummary chain;
    RunMetadata metadata;
    std::vector<std::string> notes;

    const StatEntry* find(std::string_view key) const;

    bool operator==(const PosteriorReport&) const = default;
};

/// Per statistic: mean, equal-tail interval and median over the draws where
/// it was computable, with batch-means MC half-widths. Throws NoDraws.
PosteriorReport summarize(std::span<const ComparisonDraw> draws, double level = 0.95);

/// Same, for draws stored as indices into a table of distinct comparisons:
/// draw i is distinct[sequence[i]].
PosteriorReport summarize(std::span<const ComparisonDraw> distinct, std::span<const std::uint32_t> sequence,
                          double level = 0.95);

}  // namespace bnprd
