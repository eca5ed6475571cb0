#include <cmath>
#include <sstream>

#include "doctest.h"
#include "bnprd/error.hpp"
#include "bnprd/report.hpp"
#include "bnprd/report_io.hpp"

using namespace bnprd;

namespace {

ComparisonDraw draw_with_mean_diff(double v) {
    ComparisonDraw d;
    d.mean_diff = v;
    d.control.size = 3;
    d.treatment.size = 2;
    return d;
}

PosteriorReport sample_report() {
    std::vector<ComparisonDraw> draws;
    for (int i = 1; i <= 150; ++i) draws.push_back(draw_with_mean_diff(i / 7.0));
    PosteriorReport r = summarize(draws);
    r.chain.steps = 2000;
    r.chain.split_acceptance = 0.123456789012345;
    r.chain.k_mc_half_width = 0.25;
    r.metadata.software_version = "9.9.9";
    r.metadata.seed = 18446744073709551615ULL;
    r.metadata.rng_algorithm = "mt19937_64";
    r.metadata.data_digest = "00ff";
    r.metadata.config = {{"data.input", "a \"quoted\" path"}, {"chain.seed", "7"}};
    r.notes = {"first", "second"};
    return r;
}

}  // namespace

TEST_CASE("constant draws") {
    std::vector<ComparisonDraw> draws(200, draw_with_mean_diff(0.75));
    const auto r = summarize(draws);
    const auto* e = r.find("mean_difference");
    REQUIRE(e);
    REQUIRE(e->summary);
    CHECK(e->summary->mean == 0.75);
    CHECK(e->summary->lower == 0.75);
    CHECK(e->summary->upper == 0.75);
    CHECK(*e->summary->mc_half_width == 0.0);
    CHECK(e->computable_fraction == 1.0);
}

TEST_CASE("equal-tail interval on a uniform grid") {
    std::vector<ComparisonDraw> draws;
    for (int i = 1; i <= 1000; ++i) draws.push_back(draw_with_mean_diff(i / 1000.0));
    const auto* e = summarize(draws).find("mean_difference");
    // h = 999 p: 0.025 -> 24.975, 0.975 -> 974.025 (0-based order statistics).
    CHECK(e->summary->lower == doctest::Approx(0.025975).epsilon(1e-12));
    CHECK(e->summary->upper == doctest::Approx(0.975025).epsilon(1e-12));
    CHECK(e->summary->median == doctest::Approx(0.5005).epsilon(1e-12));
    CHECK(e->summary->mean == doctest::Approx(0.5005).epsilon(1e-12));
}

TEST_CASE("never-computable statistics stay empty") {
    std::vector<ComparisonDraw> draws(10, draw_with_mean_diff(1.0));
    const auto r = summarize(draws);
    const auto* e = r.find("fuzzy_effect");
    REQUIRE(e);
    CHECK_FALSE(e->summary);
    CHECK(e->computable_fraction == 0.0);
    CHECK(e->computable_draws == 0);
    // Fewer than 100 draws: no MC error.
    CHECK_FALSE(r.find("mean_difference")->summary->mcse);
    CHECK_THROWS_AS(summarize(std::vector<ComparisonDraw>{}), Error);
}

TEST_CASE("partially computable statistics") {
    std::vector<ComparisonDraw> draws(4, draw_with_mean_diff(2.0));
    draws[1].mean_diff.reset();
    const auto* e = summarize(draws).find("mean_difference");
    CHECK(e->computable_draws == 3);
    CHECK(e->computable_fraction == 0.75);
}

TEST_CASE("indexed form matches the expanded form") {
    std::vector<ComparisonDraw> distinct{draw_with_mean_diff(1.0), draw_with_mean_diff(-2.0), draw_with_mean_diff(5.5)};
    std::vector<std::uint32_t> seq;
    std::vector<ComparisonDraw> expanded;
    for (int i = 0; i < 300; ++i) {
        const std::uint32_t j = (i * 7 + i / 13) % 3;
        seq.push_back(j);
        expanded.push_back(distinct[j]);
    }
    CHECK(summarize(distinct, seq) == summarize(expanded));
}

TEST_CASE("summary ordering invariant") {
    std::vector<ComparisonDraw> draws;
    for (int i = 0; i < 333; ++i) draws.push_back(draw_with_mean_diff(std::sin(i * 1.3)));
    for (const auto& e : summarize(draws).statistics) {
        if (!e.summary) continue;
        CHECK(e.summary->lower <= e.summary->median);
        CHECK(e.summary->median <= e.summary->upper);
    }
}

TEST_CASE("JSON round trip") {
    const PosteriorReport r = sample_report();
    const std::string json = report_to_json(r);
    const PosteriorReport back = report_from_json(json);
    CHECK(back == r);
    CHECK(report_to_json(back) == json);
    CHECK(json.find("\"fuzzy_effect\"") != std::string::npos);
    CHECK_THROWS_AS(report_from_json("{\"format\": \"other\"}"), Error);
    CHECK_THROWS_AS(report_from_json("not json"), Error);
}

TEST_CASE("CSV table layout") {
    const std::string csv = report_to_csv(sample_report());
    std::istringstream in(csv);
    std::string header, first, second;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    CHECK(header == "statistic,non_treatment,treatment,cross_group");
    CHECK(first == "sample size,\"3.00 (3.00, 3.00)\",\"2.00 (2.00, 2.00)\",NA");
    CHECK(second.rfind("mean,", 0) == 0);
    CHECK(csv.find("mean difference (treatment - non-treatment),NA,NA,\"") != std::string::npos);
    // Table rows come before extensions.
    CHECK(csv.find("KS test p-value") < csv.find("Pr[Y1 = Y0]"));
}

TEST_CASE("write_report reports IO failures") {
    CHECK_THROWS_AS(write_report(sample_report(), ReportFormat::Json, "/proc/definitely/not/here.json"), Error);
}
