#include "rcov/error.hpp"
#include "rcov/measure.hpp"
#include "rcov/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace rcov;

TEST_SUITE("measure")
{
    TEST_CASE("middle-third masses")
    {
        const auto m = build_middle_cantor(1.0 / 3.0);
        CHECK(m.meta.s == doctest::Approx(std::log(2.0) / std::log(3.0)));
        CHECK(interval_mass(m, 0.0, 1.0 / 3.0).lower == doctest::Approx(0.5));
        CHECK(interval_mass(m, 0.0, 1.0 / 9.0).upper == doctest::Approx(0.25));
        CHECK(interval_mass(m, 0.0, 1.0).lower == doctest::Approx(1.0));
        // A set inside the first gap carries nothing.
        CHECK(interval_mass(m, 0.34, 0.66).upper == 0.0);
    }

    TEST_CASE("lebesgue masses are lengths")
    {
        const auto l = build_lebesgue(0.0, 1.0);
        const auto b = interval_mass(l, 0.2, 0.7);
        CHECK(b.lower == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(b.upper == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(ball_mass(l, 0.0, 0.25).lower == doctest::Approx(0.25));
    }

    TEST_CASE("cylinder mass additivity")
    {
        const auto schemes = {build_middle_cantor(1.0 / 3.0, 1.0, 12), build_middle_cantor(0.25, 2.0, 10),
                              build_oscillating_cantor(0.25, 0.125, default_block_bounds(10), 1.0, 10)};
        for (const CantorScheme& sc : schemes) {
            // Each level-n cylinder has mass 2^-n, and a split inside a gap is additive.
            double left = sc.base_lo;
            for (int n = 1; n <= 6; ++n) {
                const double len = sc.length(n);
                const auto whole = interval_mass(sc, left, left + sc.length(n - 1));
                const auto a = interval_mass(sc, left, left + len);
                const double second = left + sc.levels[static_cast<std::size_t>(n - 1)].offset(1);
                const auto b = interval_mass(sc, second, second + len);
                CHECK(a.lower == doctest::Approx(std::ldexp(1.0, -n)));
                CHECK(a.lower + b.lower == doctest::Approx(whole.lower));
                const double cut = 0.5 * (left + len + second);
                const auto ab = interval_mass(sc, left, cut);
                const auto bc = interval_mass(sc, cut, left + sc.length(n - 1));
                CHECK(ab.lower + bc.lower == doctest::Approx(whole.lower));
            }
        }
    }

    TEST_CASE("builders validate parameters")
    {
        CHECK_THROWS_AS(build_middle_cantor(0.6), Error);
        CHECK_THROWS_AS(build_middle_cantor(0.0), Error);
        CHECK_THROWS_AS(build_spaced_cantor(0.8, 0.4, 0.5), Error);
        CHECK_THROWS_AS(build_lebesgue(1.0, 0.0), Error);
    }

    TEST_CASE("spaced scheme reduces depth and records the request")
    {
        const auto sp = build_spaced_cantor(0.4, 0.8, 0.5);
        CHECK(sp.meta.s == doctest::Approx(0.4));
        CHECK(sp.meta.u == doctest::Approx(0.8));
        CHECK(sp.depth_limit() == 2);
        REQUIRE(sp.meta.depth_requested.has_value());
        CHECK(*sp.meta.depth_requested == 8);
        CHECK(sp.levels[0].branching == 4);
        CHECK(sp.levels[1].branching == 4096);
    }

    TEST_CASE("oscillating scheme flags inconsistent exponent order")
    {
        const auto o = build_oscillating_cantor(0.25, 0.125, default_block_bounds(40));
        CHECK(o.meta.s == doctest::Approx(0.5));
        CHECK(o.meta.u == doctest::Approx(1.0 / 3.0));
        CHECK_FALSE(o.meta.exponent_order_consistent);
        const auto c = build_oscillating_cantor(0.125, 0.25, default_block_bounds(40));
        CHECK(c.meta.exponent_order_consistent);
    }

    TEST_CASE("json round trip")
    {
        const auto o = build_oscillating_cantor(0.125, 0.25, default_block_bounds(20), 1.0, 20);
        const auto back = scheme_from_json(to_json(o));
        REQUIRE(back.depth_limit() == o.depth_limit());
        for (int n = 0; n <= o.depth_limit(); ++n) {
            CHECK(back.length(n) == o.length(n));
        }
        auto doc = to_json(o);
        doc["depth_limit"] = 99;
        CHECK_THROWS_AS(scheme_from_json(doc), Error);
    }

    TEST_CASE("sampling is deterministic and lands on the support")
    {
        const auto m = build_middle_cantor(1.0 / 3.0);
        const auto a = sample_points(m, 500, 11);
        const auto b = sample_points(m, 500, 11);
        CHECK(a == b);
        for (double x : a) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
            CHECK(ball_mass(m, x, 1e-6).upper > 0.0);
        }
        CHECK(sample_points(m, 500, 12) != a);
    }

    TEST_CASE("support pieces refine to the resolution")
    {
        const auto m = build_middle_cantor(1.0 / 3.0);
        const auto pieces = support_pieces(m, 0.0, 1.0, 0.12);
        CHECK(pieces.size() == 4);
        const auto leb = support_pieces(build_lebesgue(0.0, 1.0), 0.2, 0.4, 1e-3);
        REQUIRE(leb.size() == 1);
        CHECK(leb[0].lo == doctest::Approx(0.2));
    }

    TEST_CASE("scaled copy maps hull and keeps masses")
    {
        const auto m = build_middle_cantor(1.0 / 3.0, 1.0, 20);
        const auto s = m.scaled(2.0);
        CHECK(s.hull().hi == doctest::Approx(2.0));
        CHECK(interval_mass(s, 0.0, 2.0 / 3.0).lower == doctest::Approx(0.5));
    }

    TEST_CASE("frostman fit recovers the similarity dimension")
    {
        const auto m = build_middle_cantor(1.0 / 3.0);
        std::vector<double> rs;
        for (int i = 2; i <= 14; ++i) {
            rs.push_back(std::pow(3.0, -i));
        }
        const auto fit = frostman_fit(m, sample_points(m, 64, 3), rs);
        CHECK(fit.s == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.05));
        CHECK(fit.C > 0.0);
    }
}
