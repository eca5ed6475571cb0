#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "bnprd/error.hpp"
#include "bnprd/oracle.hpp"
#include "bnprd/partition_model.hpp"
#include "support/test_oracles.hpp"

using namespace bnprd;

namespace {

RDDataset small_data(std::uint64_t seed, int n) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<RawSubject> raw;
    for (int i = 0; i < n; ++i) {
        const double r = -1.0 + 2.0 * (i + 0.5) / n;
        raw.push_back({"s" + std::to_string(i), r, (r < 0 ? -1.0 : 1.0) + 0.3 * nd(gen), nd(gen), std::nullopt});
    }
    return validate_and_sort(raw, 0.0);
}

Hyperparameters unit_hyper() {
    Hyperparameters h;
    h.C = Eigen::Matrix2d::Identity();
    return h;
}

}  // namespace

TEST_CASE("prior small tables") {
    CHECK(log_prior(OrderedPartition::from_sizes({1}), 1.0) == doctest::Approx(0.0));
    CHECK(std::exp(log_prior(OrderedPartition::from_sizes({1, 1}), 1.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::exp(log_prior(OrderedPartition::from_sizes({2}), 1.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::exp(log_prior(OrderedPartition::from_sizes({3}), 1.0)) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(std::exp(log_prior(OrderedPartition::from_sizes({1, 2}), 1.0)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::exp(log_prior(OrderedPartition::from_sizes({2, 1}), 1.0)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::exp(log_prior(OrderedPartition::from_sizes({1, 1, 1}), 1.0)) == doctest::Approx(1.0 / 6).epsilon(1e-14));
}

TEST_CASE("prior sums to one") {
    for (int n = 1; n <= 12; ++n) {
        for (double alpha : {0.5, 1.0, 2.0}) {
            double total = 0.0;
            for (const auto& p : enumerate_compositions(n)) total += std::exp(log_prior(p, alpha));
            CHECK(std::abs(total - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("prior variants differ by a constant") {
    const auto parts = enumerate_compositions(7);
    const double offset = log_prior(parts[0], 1.7) - log_prior(parts[0], 1.7, PriorVariant::PrintedN);
    CHECK(offset == doctest::Approx(std::lgamma(7.0)).epsilon(1e-12));  // log (n-1)!
    for (const auto& p : parts) {
        CHECK(log_prior(p, 1.7) - log_prior(p, 1.7, PriorVariant::PrintedN) == doctest::Approx(offset).epsilon(1e-12));
    }
}

TEST_CASE("split delta matches full prior difference") {
    for (auto variant : {PriorVariant::Normalized, PriorVariant::PrintedN, PriorVariant::AlphaTimesK}) {
        const auto p = OrderedPartition::from_sizes({3, 5, 2});
        const auto q = p.split(1, 2);
        const double direct = log_prior(q, 0.7, variant) - log_prior(p, 0.7, variant);
        CHECK(log_prior_split_delta(2, 3, 3, 0.7, variant) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("marginal at the reference point") {
    const Hyperparameters h = unit_hyper();
    const std::vector<double> x{0.0}, r{0.0};
    CHECK(block_log_marginal(x, r, h) == doctest::Approx(std::log(0.25)).epsilon(1e-14));
}

TEST_CASE("single observations match the Student-t predictive") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-2, 2);
    std::uniform_real_distribution<double> pos(0.2, 4);
    for (int rep = 0; rep < 200; ++rep) {
        Hyperparameters h;
        h.beta0 << u(gen), u(gen);
        const double c01 = 0.3 * u(gen);
        h.C << pos(gen) + 1, c01, c01, pos(gen) + 1;
        h.a = pos(gen);
        h.b = pos(gen);
        const double x = 3 * u(gen), r = u(gen);
        const double b0[2] = {h.beta0(0), h.beta0(1)};
        const double c[2][2] = {{h.C(0, 0), h.C(0, 1)}, {h.C(1, 0), h.C(1, 1)}};
        const std::vector<double> xs{x}, rs{r};
        CHECK(std::abs(block_log_marginal(xs, rs, h) - oracle::predictive_log_density(x, r, b0, c, h.a, h.b)) <= 1e-12);
    }
}

TEST_CASE("quadratic form matches the dense inverse") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(-2, 2);
    std::uniform_int_distribution<int> size(1, 6);
    for (int rep = 0; rep < 200; ++rep) {
        Hyperparameters h;
        h.beta0 << u(gen), u(gen);
        h.C << 2 + u(gen), 0.4, 0.4, 3 + u(gen);
        const int m = size(gen);
        std::vector<double> x(m), r(m);
        for (int i = 0; i < m; ++i) {
            x[i] = 2 * u(gen);
            r[i] = u(gen);
        }
        const double b0[2] = {h.beta0(0), h.beta0(1)};
        const double c[2][2] = {{h.C(0, 0), h.C(0, 1)}, {h.C(1, 0), h.C(1, 1)}};
        const double direct = oracle::quadratic_form_direct(x, r, b0, c);
        CHECK(std::abs(block_quadratic_form(x, r, h) - direct) <= 1e-8 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("quadratic form vanishes on the prior mean line") {
    Hyperparameters h;
    h.beta0 << 0.5, -2.0;
    std::vector<double> r{-1, -0.2, 0.3, 0.9}, x;
    for (double v : r) x.push_back(0.5 - 2.0 * v);
    CHECK(std::abs(block_quadratic_form(x, r, h)) <= 1e-12);
}

TEST_CASE("marginal is permutation invariant") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> nd;
    const Hyperparameters h;
    std::vector<double> x(9), r(9);
    for (int i = 0; i < 9; ++i) {
        x[i] = nd(gen);
        r[i] = nd(gen);
    }
    const double base = block_log_marginal(x, r, h);
    std::vector<int> idx{0, 1, 2, 3, 4, 5, 6, 7, 8};
    for (int rep = 0; rep < 20; ++rep) {
        std::shuffle(idx.begin(), idx.end(), gen);
        std::vector<double> px, pr;
        for (int i : idx) {
            px.push_back(x[i]);
            pr.push_back(r[i]);
        }
        CHECK(block_log_marginal(px, pr, h) == doctest::Approx(base).epsilon(1e-13));
    }
}

TEST_CASE("hyperparameter validation") {
    Hyperparameters h;
    h.alpha = 0;
    CHECK_THROWS_AS(h.validate(), Error);
    h = {};
    h.C << 1, 2, 2, 1;  // indefinite
    CHECK_THROWS_AS(h.validate(), Error);
    h = {};
    h.C << 1, 0.1, 0.2, 1;  // not symmetric
    CHECK_THROWS_AS(h.validate(), Error);
    h = {};
    CHECK_NOTHROW(h.validate());
}

TEST_CASE("kernel is additive and the cache is transparent") {
    const auto data = small_data(5, 12);
    const Hyperparameters h;
    PosteriorKernel cached(data, h);
    PosteriorKernel fresh(data, h, {PriorVariant::Normalized, false, true});
    for (const auto& p : {OrderedPartition::from_sizes({12}), OrderedPartition::from_sizes({3, 4, 5}),
                          OrderedPartition::from_sizes({1, 1, 10}), OrderedPartition::equal_blocks(12, 12)}) {
        CHECK(std::abs(cached(p) - fresh(p)) <= 1e-12);
        CHECK(std::abs(cached(p) - cached(p)) == 0.0);
        CHECK(std::abs(log_posterior_kernel(p, data, h, nullptr) - fresh(p)) <= 1e-12);
    }

    const auto p = OrderedPartition::from_sizes({3, 4, 5});
    const auto q = p.split(1, 1);
    const double expected = cached.block_term(3, 1) + cached.block_term(4, 3) - cached.block_term(3, 4) +
                            log_prior(q, h.alpha) - log_prior(p, h.alpha);
    CHECK(cached(q) - cached(p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("n = 3 posterior matches enumeration") {
    std::vector<RawSubject> raw{{"a", -1, 0.2, 0, {}}, {"b", 0.1, 1.4, 0, {}}, {"c", 0.8, -0.3, 0, {}}};
    const auto data = validate_and_sort(raw, 0.0);
    const Hyperparameters h;
    PosteriorKernel kernel(data, h);
    const auto parts = enumerate_compositions(3);
    double z = 0;
    for (const auto& p : parts) z += std::exp(kernel(p));
    const auto exact = exact_posterior(data, h);
    for (const auto& p : parts) CHECK(std::abs(std::exp(kernel(p)) / z - exact.probability(p)) <= 1e-10);
}
