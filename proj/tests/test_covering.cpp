#include "rcov/covering.hpp"
#include "rcov/error.hpp"
#include "rcov/parallel.hpp"

#include <doctest.h>

using namespace rcov;

TEST_SUITE("covering")
{
    TEST_CASE("realization is deterministic and balls are centered")
    {
        const auto l = build_lebesgue(0.0, 1.0);
        const auto a = realize(l, power_radii(2.0), 1000, 9);
        const auto b = realize(l, power_radii(2.0), 1000, 9);
        CHECK(a.centers == b.centers);
        CHECK(a.K() == 1000);
        const Interval ball = a.ball(10);
        CHECK(ball.lo == doctest::Approx(a.centers[9] - 0.01));
        CHECK(ball.hi == doctest::Approx(a.centers[9] + 0.01));
        CHECK(realize(l, power_radii(2.0), 1000, 10).centers != a.centers);
    }

    TEST_CASE("union of a range matches the canonicalized ball list")
    {
        const auto real = realize(build_middle_cantor(0.25), power_radii(1.5), 500, 3);
        std::vector<Interval> balls;
        for (std::int64_t k = 20; k <= 300; ++k) {
            balls.push_back(real.ball(k));
        }
        CHECK(union_range(real, 20, 300) == IntervalUnion::from_intervals(balls));
        CHECK(union_range(real, 5, 5) == IntervalUnion::from_intervals({real.ball(5)}));
        CHECK_THROWS_AS(union_range(real, 10, 5), Error);
    }

    TEST_CASE("limsup approximation lies inside each block union")
    {
        const auto real = realize(build_lebesgue(0.0, 1.0), power_radii(1.2), 20000, 4);
        const std::vector<std::int64_t> bounds{100, 1000, 5000, 20000};
        const auto la = limsup_approx(real, bounds);
        CHECK_FALSE(la.degenerate);
        for (std::size_t j = 1; j < bounds.size(); ++j) {
            CHECK(union_range(real, bounds[j - 1] + 1, bounds[j]).contains(la.set));
        }
        CHECK(limsup_approx(real, {0, 100}).degenerate);
        CHECK_THROWS_AS(limsup_approx(real, {100}), Error);
    }

    TEST_CASE("geometric schedule")
    {
        const auto s = geometric_schedule(1000000, 1000, 4);
        REQUIRE(s.size() == 5);
        CHECK(s.front() == 1000);
        CHECK(s.back() == 1000000);
        for (std::size_t i = 1; i < s.size(); ++i) {
            CHECK(s[i] > s[i - 1]);
        }
    }

    TEST_CASE("multiplicity profile matches brute force")
    {
        const auto real = realize(build_lebesgue(0.0, 1.0), power_radii(1.0), 300, 8);
        std::vector<double> grid;
        for (int i = 0; i <= 200; ++i) {
            grid.push_back(i / 200.0);
        }
        const auto prof = multiplicity_profile(real, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::int64_t c = 0;
            for (std::int64_t k = 1; k <= real.K(); ++k) {
                const Interval b = real.ball(k);
                c += (grid[i] > b.lo && grid[i] < b.hi) ? 1 : 0;
            }
            CHECK(prof[i] == c);
        }
    }

    TEST_CASE("limsup set is identical under different thread counts")
    {
        const auto real = realize(build_middle_cantor(0.25), power_radii(1.1), 50000, 21);
        const auto bounds = geometric_schedule(50000, 100, 5);
        set_thread_count(1);
        const auto a = limsup_approx(real, bounds);
        set_thread_count(4);
        const auto b = limsup_approx(real, bounds);
        const auto real4 = realize(build_middle_cantor(0.25), power_radii(1.1), 50000, 21);
        set_thread_count(0);
        CHECK(a.set == b.set);
        CHECK(real4.centers == real.centers);
    }
}
