#include "rcov/error.hpp"
#include "rcov/interval_union.hpp"
#include "rcov/rng.hpp"

#include <doctest.h>

#include <sstream>

using namespace rcov;

namespace {

IntervalUnion random_union(Rng& rng, int n)
{
    std::vector<Interval> v;
    for (int i = 0; i < n; ++i) {
        const double a = rng.uniform();
        v.push_back({a, a + 0.1 * rng.uniform()});
    }
    return IntervalUnion::from_intervals(v);
}

} // namespace

TEST_SUITE("interval_union")
{
    TEST_CASE("canonicalization merges overlaps and touching runs, drops empties")
    {
        const auto u = IntervalUnion::from_intervals({{0.5, 0.7}, {0.0, 0.2}, {0.1, 0.3}, {0.7, 0.8}, {0.9, 0.9}});
        REQUIRE(u.size() == 2);
        CHECK(u.intervals()[0] == Interval{0.0, 0.3});
        CHECK(u.intervals()[1] == Interval{0.5, 0.8});
        CHECK(u.is_canonical());
        CHECK(u.total_length() == doctest::Approx(0.6));
    }

    TEST_CASE("open-interval membership")
    {
        const auto u = IntervalUnion::from_intervals({{0.0, 0.5}});
        CHECK_FALSE(u.contains_point(0.0));
        CHECK(u.contains_point(0.25));
        CHECK_FALSE(u.contains_point(0.5));
    }

    TEST_CASE("intersection and union oracle")
    {
        const auto a = IntervalUnion::from_intervals({{0, 2}, {3, 5}});
        const auto b = IntervalUnion::from_intervals({{1, 4}});
        CHECK(a.intersect(b) == IntervalUnion::from_intervals({{1, 2}, {3, 4}}));
        CHECK(a.unite(b) == IntervalUnion::from_intervals({{0, 5}}));
        CHECK(a.intersect(IntervalUnion{}).empty());
    }

    TEST_CASE("monotonicity and canonical outputs on random unions")
    {
        Rng rng(42);
        for (int trial = 0; trial < 200; ++trial) {
            const auto a = random_union(rng, 1 + trial % 17);
            const auto b = random_union(rng, 1 + trial % 11);
            const auto i = a.intersect(b);
            const auto u = a.unite(b);
            CHECK(i.is_canonical());
            CHECK(u.is_canonical());
            CHECK(u.contains(a));
            CHECK(u.contains(b));
            CHECK(a.contains(i));
            CHECK(b.contains(i));
            CHECK(i.total_length() <= std::min(a.total_length(), b.total_length()) + 1e-15);
            CHECK(u.total_length() + i.total_length() == doctest::Approx(a.total_length() + b.total_length()));
        }
    }

    TEST_CASE("csv and binary round trips are exact")
    {
        Rng rng(7);
        const auto u = random_union(rng, 50);
        std::stringstream csv;
        write_csv(csv, u);
        CHECK(csv.str().rfind("left,right\n", 0) == 0);
        CHECK(read_csv(csv) == u);
        std::stringstream bin;
        write_binary(bin, u);
        CHECK(read_binary(bin) == u);
    }

    TEST_CASE("binary reader rejects bad magic")
    {
        std::stringstream bad("XXXX0000000000000000");
        CHECK_THROWS_AS(read_binary(bad), Error);
    }
}
