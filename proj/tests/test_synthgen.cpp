#include <cmath>
#include <sstream>

#include "doctest.h"
#include "bnprd/csv_io.hpp"
#include "bnprd/error.hpp"
#include "bnprd/synthgen.hpp"

using namespace bnprd;

TEST_CASE("noiseless limit lies on the block lines") {
    SynthConfig c;
    c.n = 40;
    c.composition = {15, 25};
    c.blocks = {{1.0, 2.0, 0.0}, {-3.0, 0.5, 0.0}};
    c.outcome = {0.5, 0.0, 0.0, 1.0, 0.0};
    const auto res = generate(c);
    const auto& d = res.data;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& line = c.blocks[i < 15 ? 0 : 1];
        CHECK(std::abs(d.x()[i] - (line.intercept + line.slope * d.r()[i])) <= 1e-5);
        CHECK(d.y()[i] == 0.5 + (d.t()[i] ? 1.0 : 0.0));
    }
}

TEST_CASE("sharp compliance follows the cutoff") {
    const auto d = generate(sharp_recovery_config(5)).data;
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d.t()[i] == (d.r()[i] >= 0.0 ? 1 : 0));
}

TEST_CASE("same seed, same bytes") {
    std::ostringstream a, b, c;
    write_dataset_csv(a, generate(sharp_recovery_config(9)).data);
    write_dataset_csv(b, generate(sharp_recovery_config(9)).data);
    write_dataset_csv(c, generate(sharp_recovery_config(10)).data);
    CHECK(a.str() == b.str());
    CHECK(a.str() != c.str());
}

TEST_CASE("generated data survives validation unchanged") {
    const auto d = generate(sharp_recovery_config(3)).data;
    CHECK(validate_and_sort(d.to_raw(), d.cutoff()) == d);
}

TEST_CASE("block moments are consistent with the configuration") {
    SynthConfig c;
    c.n = 20000;
    c.composition = {12000, 8000};
    c.blocks = {{0.5, 0.0, 0.25}, {-1.0, 0.0, 4.0}};
    const auto d = generate(c).data;
    std::size_t start = 0;
    for (std::size_t b = 0; b < 2; ++b) {
        const auto m = static_cast<std::size_t>(c.composition[b]);
        double mean = 0, ss = 0;
        for (std::size_t i = start; i < start + m; ++i) mean += d.x()[i];
        mean /= double(m);
        for (std::size_t i = start; i < start + m; ++i) ss += std::pow(d.x()[i] - mean, 2);
        const double var = ss / double(m - 1);
        const double sigma2 = c.blocks[b].variance;
        CHECK(std::abs(mean - c.blocks[b].intercept) <= 3 * std::sqrt(sigma2 / double(m)));
        CHECK(std::abs(var - sigma2) <= 3 * sigma2 * std::sqrt(2.0 / double(m - 1)));
        start += m;
    }
}

TEST_CASE("fuzzy compliance rates") {
    SynthConfig c = sharp_recovery_config(4, 4000);
    c.p_treat_right = 0.9;
    c.p_treat_left = 0.1;
    const auto d = generate(c).data;
    double right = 0, left = 0, nr = 0, nl = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        (d.r()[i] >= 0 ? right : left) += d.t()[i];
        (d.r()[i] >= 0 ? nr : nl) += 1;
    }
    CHECK(std::abs(right / nr - 0.9) < 0.03);
    CHECK(std::abs(left / nl - 0.1) < 0.03);
}

TEST_CASE("invalid configurations") {
    SynthConfig c = sharp_recovery_config(1);
    c.composition[0] += 1;
    CHECK_THROWS_AS(generate(c), Error);
    c = sharp_recovery_config(1);
    c.p_treat_left = 1.5;
    CHECK_THROWS_AS(generate(c), Error);
    c = sharp_recovery_config(1);
    c.blocks.pop_back();
    CHECK_THROWS_AS(generate(c), Error);
    c = sharp_recovery_config(1);
    c.cutoff = 5.0;  // no treated side
    try {
        generate(c);
        FAIL("expected InvalidConfig");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidConfig);
    }
}
