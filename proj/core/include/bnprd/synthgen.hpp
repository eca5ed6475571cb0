#pragma once

#include <cstdint>
#include <vector>

#include "bnprd/dataset.hpp"

namespace bnprd {

/// Regression of x on r within one true block: x ~ N(intercept + slope r, variance).
struct BlockLine {
    double intercept = 0.0;
    double slope = 0.0;
    double variance = 1.0;
};

/// Scaffolding outcome layer used for recovery tests:
/// y = level + slope_left (r - r0) [r < r0] + slope_right (r - r0) [r >= r0] + jump t + noise_sd e.
struct OutcomeModel {
    double level = 0.0;
    double slope_left = 0.0;
    double slope_right = 0.0;
    double jump = 1.0;
    double noise_sd = 0.5;
};

struct SynthConfig {
    int n = 200;
    double cutoff = 0.0;
    double r_min = -1.0;
    double r_max = 1.0;
    /// Fraction of the grid spacing used as uniform jitter, in [0, 1).
    double jitter = 0.5;
    std::vector<int> composition;
    std::vector<BlockLine> blocks;
    OutcomeModel outcome;
    /// P(t = 1) for r >= r0 and r < r0; sharp designs use 1 and 0.
    double p_treat_right = 1.0;
    double p_treat_left = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SynthResult {
    RDDataset data;
    SynthConfig truth;
};

/// Smallest variance used for x; a requested variance of zero is raised to this.
inline constexpr double kMinBlockVariance = 1e-12;

SynthResult generate(const SynthConfig& config);

/// Three-block sharp design on [-1, 1]: the middle block straddles the cutoff
/// with flat x and is bounded by x jumps on either side.
SynthConfig sharp_recovery_config(std::uint64_t seed, int n = 200);

}  // namespace bnprd
