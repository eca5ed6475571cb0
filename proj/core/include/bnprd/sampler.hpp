#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnprd/dataset.hpp"
#include "bnprd/partition.hpp"
#include "bnprd/partition_model.hpp"
#include "bnprd/rng.hpp"

namespace bnprd {

struct ChainConfig {
    std::int64_t iterations = 200000;
    std::int64_t burn_in = 20000;
    std::int64_t thin = 1;
    std::uint64_t seed = 20240521;
    int initial_blocks = 10;
    bool enable_shift_move = false;
    int chains = 1;
    PriorVariant prior = PriorVariant::Normalized;
    /// Recompute the kernel from scratch every 1000 steps and compare.
    bool debug_check = false;
    /// When set, k_n and log-kernel traces are written here, one value per line.
    std::optional<std::string> trace_dir;

    /// Throws InvalidConfig; n is the dataset size.
    void validate(std::size_t n) const;
};

enum class MoveType : int { Split = 0, Merge = 1, Shift = 2 };
inline constexpr std::size_t kMoveTypes = 3;
std::string_view to_string(MoveType m) noexcept;

struct MoveCounters {
    std::array<std::int64_t, kMoveTypes> proposed{};
    std::array<std::int64_t, kMoveTypes> accepted{};
    /// Proposals that could not be realised (n == 1, or an empty-block shift).
    std::int64_t null_moves = 0;

    double acceptance_rate(MoveType m) const;
};

struct ChainState {
    OrderedPartition partition;
    double log_kernel = 0.0;
    MoveCounters counters;
};

struct Proposal {
    MoveType move = MoveType::Split;
    OrderedPartition candidate;
    double log_proposal_ratio = 0.0;  // log q(current | candidate) - log q(candidate | current)
    bool null_move = false;
    /// Blocks (start, length) that leave and enter the partition.
    std::vector<std::pair<int, int>> removed;
    std::vector<std::pair<int, int>> added;
};

/// Split/merge proposal with probability 1/2 each (forced at k = 1 or when all
/// blocks are singletons). With shift enabled, a boundary shift is proposed
/// with probability 1/3 first.
Proposal propose(const ChainState& state, Rng& rng, bool enable_shift = false);

/// Every candidate reachable in one proposal from `partition`, with its
/// probability. Null moves are reported as the partition itself.
std::vector<std::pair<OrderedPartition, double>> proposal_distribution(
    const OrderedPartition& partition, bool enable_shift = false);

/// One Metropolis-Hastings step; returns whether the candidate was accepted.
bool mh_step(ChainState& state, PosteriorKernel& kernel, Rng& rng, bool enable_shift = false);

struct McseResult {
    double mcse = 0.0;
    double half_width = 0.0;
    std::size_t batches = 0;
    std::size_t batch_size = 0;
};

/// Batch means with floor(sqrt(N)) batches; half_width = 1.96 * mcse.
/// Throws TraceTooShort below 100 values.
McseResult batch_means_mcse(std::span<const double> trace);

struct Diagnostics {
    MoveCounters counters;
    std::vector<int> k_trace;
    std::vector<double> log_kernel_trace;
    std::optional<McseResult> k_mcse;
    double k_mean = 0.0;
    double k_effective_samples = 0.0;
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    std::string rng_algorithm{Rng::kAlgorithm};
    int chains = 1;
};

struct ChainResult {
    std::vector<OrderedPartition> draws;
    Diagnostics diagnostics;
};

using DrawSink = std::function<void(const OrderedPartition&)>;

/// Runs config.chains chains (concurrently when more than one) and returns
/// post-burn-in, thinned draws in chain order. Deterministic given the seed.
ChainResult run_chain(const RDDataset& data, const Hyperparameters& hyper, const ChainConfig& config);

/// Streaming form of run_chain for a single chain: draws go to `sink`
/// instead of being stored.
Diagnostics run_chain(const RDDataset& data, const Hyperparameters& hyper, const ChainConfig& config,
                      const DrawSink& sink);

}  // namespace bnprd
