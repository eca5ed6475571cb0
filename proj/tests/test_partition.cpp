#include <algorithm>
#include <set>

#include "doctest.h"
#include "bnprd/error.hpp"
#include "bnprd/partition.hpp"

using namespace bnprd;

TEST_CASE("sizes and labels agree") {
    const auto p = OrderedPartition::from_sizes({2, 1, 3});
    CHECK(p.n() == 6);
    CHECK(p.k() == 3);
    CHECK(p.labels() == std::vector<int>{0, 0, 1, 2, 2, 2});
    CHECK(OrderedPartition::from_labels(p.labels()) == p);
    CHECK(p.block_start(2) == 3);
    CHECK(p.locate(4).block == 2);
    CHECK(p.locate(4).start == 3);
    CHECK(p.locate(0).block == 0);
    CHECK(p.to_string() == "(2,1,3)");
}

TEST_CASE("invalid partitions are rejected") {
    CHECK_THROWS_AS(OrderedPartition::from_sizes({}), Error);
    CHECK_THROWS_AS(OrderedPartition::from_sizes({2, 0}), Error);
    const std::vector<int> skip{0, 2};
    const std::vector<int> down{0, 1, 0};
    const std::vector<int> late{1, 1};
    CHECK_THROWS_AS(OrderedPartition::from_labels(skip), Error);
    CHECK_THROWS_AS(OrderedPartition::from_labels(down), Error);
    CHECK_THROWS_AS(OrderedPartition::from_labels(late), Error);
}

TEST_CASE("equal blocks differ by at most one") {
    for (int n = 1; n <= 40; ++n) {
        for (int k = 1; k <= 12; ++k) {
            const auto p = OrderedPartition::equal_blocks(n, k);
            CHECK(p.n() == n);
            CHECK(p.k() == std::min(n, k));
            const auto [lo, hi] = std::minmax_element(p.sizes().begin(), p.sizes().end());
            CHECK(*hi - *lo <= 1);
        }
    }
}

TEST_CASE("split and merge are inverse") {
    const auto p = OrderedPartition::from_sizes({4, 2});
    const auto s = p.split(0, 1);
    CHECK(s.sizes() == std::vector<int>{1, 3, 2});
    CHECK(s.merge(0) == p);
    CHECK(p.merge(0).sizes() == std::vector<int>{6});
    CHECK_THROWS_AS(p.split(1, 2), Error);
    CHECK_THROWS_AS(p.split(0, 0), Error);
    CHECK_THROWS_AS(p.merge(1), Error);
}

TEST_CASE("hash separates compositions") {
    std::set<std::size_t> hashes;
    OrderedPartitionHash h;
    for (int mask = 0; mask < 256; ++mask) {
        std::vector<int> sizes;
        int run = 1;
        for (int i = 0; i < 8; ++i) {
            if (mask >> i & 1) {
                sizes.push_back(run);
                run = 1;
            } else {
                ++run;
            }
        }
        sizes.push_back(run);
        hashes.insert(h(OrderedPartition::from_sizes(sizes)));
    }
    CHECK(hashes.size() == 256);
}
