#include "bnprd/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bnprd/error.hpp"
#include "bnprd/rng.hpp"

namespace bnprd {
namespace {
constexpr const char* kModule = "synthgen";
}

void SynthConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, kModule, what); };
    if (n < 2) bad("n must be at least 2");
    if (!(r_min < r_max)) bad("r_min must be below r_max");
    if (!(jitter >= 0.0 && jitter < 1.0)) bad("jitter must lie in [0, 1)");
    if (composition.empty() || composition.size() != blocks.size()) {
        bad("composition and block lines must be non-empty and the same length");
    }
    if (std::any_of(composition.begin(), composition.end(), [](int s) { return s <= 0; })) {
        bad("block sizes must be positive");
    }
    if (std::accumulate(composition.begin(), composition.end(), 0) != n) bad("composition must sum to n");
    for (const auto& b : blocks) {
        if (!(b.variance >= 0.0)) bad("block variances must be non-negative");
    }
    if (!(outcome.noise_sd >= 0.0)) bad("outcome noise must be non-negative");
    if (!(p_treat_right >= 0.0 && p_treat_right <= 1.0 && p_treat_left >= 0.0 && p_treat_left <= 1.0)) {
        bad("compliance probabilities must lie in [0, 1]");
    }
}

SynthResult generate(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);

    const double spacing = (config.r_max - config.r_min) / config.n;
    std::vector<double> r(static_cast<std::size_t>(config.n));
    for (int i = 0; i < config.n; ++i) {
        r[static_cast<std::size_t>(i)] =
            config.r_min + (i + 0.5) * spacing + config.jitter * spacing * (rng.uniform() - 0.5);
    }
    std::sort(r.begin(), r.end());

    std::vector<RawSubject> raw;
    raw.reserve(r.size());
    std::size_t i = 0;
    for (std::size_t block = 0; block < config.composition.size(); ++block) {
        const BlockLine& line = config.blocks[block];
        const double sd = std::sqrt(std::max(line.variance, kMinBlockVariance));
        for (int j = 0; j < config.composition[block]; ++j, ++i) {
            RawSubject s;
            char id[32];
            std::snprintf(id, sizeof id, "s%04zu", i + 1);
            s.id = id;
            s.r = r[i];
            s.x = line.intercept + line.slope * s.r + sd * rng.normal();
            const bool right = s.r >= config.cutoff;
            const bool t = rng.bernoulli(right ? config.p_treat_right : config.p_treat_left);
            s.t = t;
            const double slope = right ? config.outcome.slope_right : config.outcome.slope_left;
            s.y = config.outcome.level + slope * (s.r - config.cutoff) + config.outcome.jump * (t ? 1.0 : 0.0) +
                  config.outcome.noise_sd * rng.normal();
            raw.push_back(std::move(s));
        }
    }

    try {
        return SynthResult{validate_and_sort(std::move(raw), config.cutoff), config};
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, kModule, e.what());
    }
}

SynthConfig sharp_recovery_config(std::uint64_t seed, int n) {
    SynthConfig c;
    c.n = n;
    c.cutoff = 0.0;
    c.r_min = -1.0;
    c.r_max = 1.0;
    const int outer = (n * 7) / 20;
    c.composition = {outer, n - 2 * outer, outer};
    c.blocks = {{-2.0, 0.0, 0.04}, {0.0, 0.0, 0.04}, {2.0, 0.0, 0.04}};
    c.outcome = {0.0, 0.5, 0.5, 1.0, 0.5};
    c.p_treat_right = 1.0;
    c.p_treat_left = 0.0;
    c.seed = seed;
    return c;
}

}  // namespace bnprd
