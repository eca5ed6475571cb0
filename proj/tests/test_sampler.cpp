#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "bnprd/error.hpp"
#include "bnprd/oracle.hpp"
#include "bnprd/sampler.hpp"

using namespace bnprd;

namespace {

RDDataset make_data(std::uint64_t seed, int n, double noise = 0.3) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<RawSubject> raw;
    for (int i = 0; i < n; ++i) {
        const double r = -1.0 + 2.0 * (i + 0.5) / n;
        raw.push_back({"s" + std::to_string(i), r, (r < 0 ? -1.0 : 1.0) + noise * nd(gen), nd(gen), std::nullopt});
    }
    return validate_and_sort(raw, 0.0);
}

ChainState state_for(const OrderedPartition& p) { return {p, 0.0, {}}; }

double probability_of(const std::vector<std::pair<OrderedPartition, double>>& dist, const OrderedPartition& p) {
    double total = 0.0;
    for (const auto& [q, prob] : dist) {
        if (q == p) total += prob;
    }
    return total;
}

}  // namespace

TEST_CASE("forced split from a single block") {
    const auto dist = proposal_distribution(OrderedPartition::from_sizes({5}));
    REQUIRE(dist.size() == 4);
    for (const auto& [p, prob] : dist) {
        CHECK(p.k() == 2);
        CHECK(prob == doctest::Approx(0.25).epsilon(1e-15));
    }
}

TEST_CASE("forced merge from singletons") {
    const auto dist = proposal_distribution(OrderedPartition::from_sizes({1, 1, 1}));
    REQUIRE(dist.size() == 2);
    for (const auto& [p, prob] : dist) {
        CHECK(p.k() == 2);
        CHECK(prob == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("proposal ratio for a split/merge pair at n = 3") {
    const auto from = OrderedPartition::from_sizes({2, 1});
    const auto to = OrderedPartition::from_sizes({1, 1, 1});
    CHECK(probability_of(proposal_distribution(from), to) == doctest::Approx(0.5));
    CHECK(probability_of(proposal_distribution(to), from) == doctest::Approx(0.5));
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const Proposal p = propose(state_for(from), rng);
        if (p.candidate == to) CHECK(p.log_proposal_ratio == doctest::Approx(0.0));
    }
}

TEST_CASE("proposal kernel sums to one and matches reported ratios") {
    for (bool shift : {false, true}) {
        for (int n = 1; n <= 6; ++n) {
            for (const auto& p : enumerate_compositions(n)) {
                const auto dist = proposal_distribution(p, shift);
                double total = 0.0;
                for (const auto& [q, prob] : dist) {
                    total += prob;
                    CHECK(q.n() == n);
                }
                CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

                Rng rng(static_cast<std::uint64_t>(n * 1000 + p.k()));
                for (int rep = 0; rep < 30; ++rep) {
                    const Proposal prop = propose(state_for(p), rng, shift);
                    if (prop.null_move) continue;
                    const double fwd = probability_of(dist, prop.candidate);
                    const double rev = probability_of(proposal_distribution(prop.candidate, shift), p);
                    REQUIRE(fwd > 0.0);
                    REQUIRE(rev > 0.0);
                    CHECK(prop.log_proposal_ratio == doctest::Approx(std::log(rev) - std::log(fwd)).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("bookkeeping stays consistent with recomputation") {
    const auto data = make_data(3, 30);
    const Hyperparameters h;
    PosteriorKernel kernel(data, h);
    PosteriorKernel fresh(data, h, {PriorVariant::Normalized, false, true});
    for (bool shift : {false, true}) {
        Rng rng(99);
        ChainState s{OrderedPartition::equal_blocks(30, 5), 0.0, {}};
        s.log_kernel = kernel(s.partition);
        for (int step = 0; step < 5000; ++step) {
            mh_step(s, kernel, rng, shift);
            if (step % 250 == 0) CHECK(std::abs(s.log_kernel - fresh(s.partition)) <= 1e-8);
        }
        std::int64_t proposed = 0;
        for (auto v : s.counters.proposed) proposed += v;
        CHECK(proposed + s.counters.null_moves >= 5000);
    }
}

TEST_CASE("uphill moves are always accepted") {
    // Two clean x regimes, so uphill proposals exist from most starting points.
    std::vector<RawSubject> raw;
    for (int i = 0; i < 4; ++i) raw.push_back({"l" + std::to_string(i), -1.0 + 0.1 * i, 0.01 * i, 0.0, {}});
    for (int i = 0; i < 4; ++i) raw.push_back({"r" + std::to_string(i), 0.1 + 0.1 * i, 30.0 * (i % 2 ? 1 : -1), 0.0, {}});
    const auto data = validate_and_sort(raw, 0.0);
    PosteriorKernel kernel(data, Hyperparameters{});
    Rng rng(4);
    int uphill = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        std::vector<int> sizes;
        for (int left = 8; left > 0;) {
            const int m = 1 + static_cast<int>(rng.uniform_open0() * left) % left;
            sizes.push_back(m);
            left -= m;
        }
        ChainState s{OrderedPartition::from_sizes(sizes), 0.0, {}};
        s.log_kernel = kernel(s.partition);
        Rng probe = rng;
        const Proposal p = propose(s, probe);
        const double gain = p.null_move ? -1.0 : kernel(p.candidate) - s.log_kernel + p.log_proposal_ratio;
        const bool accepted = mh_step(s, kernel, rng);
        if (gain >= 0.0) {
            ++uphill;
            CHECK(accepted);
        }
    }
    CHECK(uphill > 50);
}

TEST_CASE("run_chain determinism and bookkeeping") {
    const auto data = make_data(8, 25);
    const Hyperparameters h;
    ChainConfig c;
    c.iterations = 3000;
    c.burn_in = 500;
    c.thin = 7;
    c.seed = 12345;
    c.initial_blocks = 4;
    const auto a = run_chain(data, h, c);
    const auto b = run_chain(data, h, c);
    CHECK(a.draws == b.draws);
    CHECK(a.diagnostics.log_kernel_trace == b.diagnostics.log_kernel_trace);
    CHECK(a.draws.size() == static_cast<std::size_t>((3000 - 500 + 6) / 7));

    c.seed = 12346;
    CHECK(run_chain(data, h, c).draws != a.draws);

    c.iterations = 11;
    c.burn_in = 10;
    c.thin = 1;
    CHECK(run_chain(data, h, c).draws.size() == 1);

    std::size_t streamed = 0;
    c.iterations = 2000;
    c.burn_in = 0;
    const auto diag = run_chain(data, h, c, [&](const OrderedPartition&) { ++streamed; });
    CHECK(streamed == 2000);
    CHECK(diag.steps == 2000);
}

TEST_CASE("multiple chains concatenate in chain order") {
    const auto data = make_data(8, 25);
    ChainConfig c;
    c.iterations = 2000;
    c.burn_in = 1000;
    c.chains = 3;
    c.debug_check = true;
    const auto res = run_chain(data, Hyperparameters{}, c);
    CHECK(res.draws.size() == 3000);
    CHECK(res.diagnostics.chains == 3);
    CHECK(res.diagnostics.steps == 6000);
    CHECK(run_chain(data, Hyperparameters{}, c).draws == res.draws);
}

TEST_CASE("config validation") {
    ChainConfig c;
    c.burn_in = c.iterations;
    CHECK_THROWS_AS(c.validate(20), Error);
    c = {};
    c.initial_blocks = 21;
    CHECK_THROWS_AS(c.validate(20), Error);
    c = {};
    c.thin = 0;
    CHECK_THROWS_AS(c.validate(20), Error);
    c = {};
    CHECK_NOTHROW(c.validate(20));
}

TEST_CASE("larger alpha gives more blocks") {
    const auto data = make_data(21, 60, 2.0);
    ChainConfig c;
    c.iterations = 30000;
    c.burn_in = 5000;
    Hyperparameters lo, hi;
    lo.alpha = 0.1;
    hi.alpha = 50.0;
    CHECK(run_chain(data, hi, c).diagnostics.k_mean > run_chain(data, lo, c).diagnostics.k_mean);
}

TEST_CASE("batch means") {
    CHECK_THROWS_AS(batch_means_mcse(std::vector<double>(50, 1.0)), Error);
    const auto flat = batch_means_mcse(std::vector<double>(1000, 2.5));
    CHECK(flat.mcse == 0.0);
    CHECK(flat.half_width == 0.0);
    CHECK(flat.batches == 31);

    Rng rng(2024);
    std::vector<double> trace(1000000);
    for (auto& v : trace) v = rng.normal();
    const auto iid = batch_means_mcse(trace);
    CHECK(iid.mcse > 1e-3 / 1.2);
    CHECK(iid.mcse < 1e-3 * 1.2);
    CHECK(iid.half_width == doctest::Approx(1.96 * iid.mcse));
}

TEST_CASE("trace files") {
    const auto dir = std::filesystem::temp_directory_path() / "bnprd_trace_test";
    std::filesystem::remove_all(dir);
    ChainConfig c;
    c.iterations = 300;
    c.burn_in = 100;
    c.trace_dir = dir.string();
    run_chain(make_data(1, 12), Hyperparameters{}, c);
    std::ifstream k(dir / "k_n.chain0.txt");
    int lines = 0;
    std::string line;
    while (std::getline(k, line)) ++lines;
    CHECK(lines == 200);
    CHECK(std::filesystem::exists(dir / "log_kernel.chain0.txt"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("small posterior is recovered within Monte Carlo error") {
    const auto data = make_data(77, 5, 0.8);
    const Hyperparameters h;
    const auto exact = exact_posterior(data, h);
    ChainConfig c;
    c.iterations = 120000;
    c.burn_in = 2000;
    c.initial_blocks = 2;
    const auto res = run_chain(data, h, c);
    std::map<OrderedPartition, std::vector<double>> indicator;
    for (const auto& [p, prob] : exact.probabilities) indicator[p].reserve(res.draws.size());
    for (const auto& d : res.draws) {
        for (auto& [p, v] : indicator) v.push_back(p == d ? 1.0 : 0.0);
    }
    for (const auto& [p, prob] : exact.probabilities) {
        const auto& v = indicator[p];
        double mean = 0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        const double se = std::max(batch_means_mcse(v).mcse, 1e-4);
        INFO(p.to_string() << " exact " << prob << " mcmc " << mean);
        CHECK(std::abs(mean - prob) <= 3.5 * se);
    }
}
