#include "rcov/energy.hpp"
#include "rcov/error.hpp"
#include "rcov/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace rcov;

namespace {

bool overlap(const EnergyReport& a, const EnergyReport& b) { return a.lower <= b.upper && b.lower <= a.upper; }

const double k_dim3 = std::log(2.0) / std::log(3.0);

} // namespace

TEST_SUITE("energy")
{
    TEST_CASE("uniform pair integral oracles")
    {
        CHECK(uniform_pair_integral(0, 1, 0, 1, 0.5) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
        // Separated unit intervals, t = 1/2: closed form via the antiderivative.
        auto F = [](double z) { return std::pow(z, 1.5) / 0.75; };
        const double exact = F(3) + F(1) - 2 * F(2);
        CHECK(uniform_pair_integral(0, 1, 2, 3, 0.5) == doctest::Approx(exact).epsilon(1e-10));
        CHECK(uniform_pair_integral(0, 1, 10, 11, 0.5) == doctest::Approx(F(11) + F(9) - 2 * F(10)).epsilon(1e-8));
        CHECK(std::isinf(uniform_pair_integral(0, 1, 0.5, 2, 1.2)));
    }

    TEST_CASE("lebesgue half-energy is 8/3 by every method")
    {
        const auto l = build_lebesgue(0.0, 1.0);
        for (auto m : {EnergyMethod::recursive_exact, EnergyMethod::cylinder_quadrature, EnergyMethod::monte_carlo}) {
            const auto r = t_energy(l, 0.5, m);
            CHECK(r.value == doctest::Approx(8.0 / 3.0).epsilon(0.01));
            CHECK(r.lower <= 8.0 / 3.0 + 1e-9);
            CHECK(r.upper >= 8.0 / 3.0 - 1e-9);
            CHECK_FALSE(r.diverged);
        }
    }

    TEST_CASE("small t energies approach one")
    {
        const auto r = t_energy(build_middle_cantor(1.0 / 3.0), 1e-4, EnergyMethod::cylinder_quadrature);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-3));
    }

    TEST_CASE("middle-third methods agree")
    {
        const auto m = build_middle_cantor(1.0 / 3.0);
        EnergyOptions o;
        o.mc_samples = 50000;
        for (double t : {0.3, 0.5, 0.6}) {
            const auto a = t_energy(m, t, EnergyMethod::recursive_exact, o);
            const auto b = t_energy(m, t, EnergyMethod::cylinder_quadrature, o);
            const auto c = t_energy(m, t, EnergyMethod::monte_carlo, o);
            CHECK(overlap(a, b));
            CHECK(overlap(a, c));
            CHECK(a.error_bound >= 0);
        }
    }

    TEST_CASE("energy beyond the similarity dimension diverges")
    {
        const auto m = build_middle_cantor(1.0 / 3.0);
        const auto r = t_energy(m, 0.7, EnergyMethod::recursive_exact);
        CHECK(r.diverged);
        const auto q = t_energy(m, 0.7, EnergyMethod::cylinder_quadrature);
        CHECK(q.diverged);
    }

    TEST_CASE("energy is non-decreasing in t for diameter one")
    {
        const auto m = build_middle_cantor(0.25);
        double prev = 0.0;
        for (double t = 0.05; t < 0.5; t += 0.05) {
            const auto r = t_energy(m, t, EnergyMethod::cylinder_quadrature);
            CHECK(r.upper >= prev);
            prev = r.lower;
        }
    }

    TEST_CASE("scaling covariance")
    {
        const auto m = build_middle_cantor(1.0 / 3.0, 1.0, 30);
        const double t = 0.4;
        const auto base = t_energy(m, t, EnergyMethod::cylinder_quadrature);
        for (double lambda : {2.0, 0.5}) {
            const auto s = t_energy(m.scaled(lambda), t, EnergyMethod::cylinder_quadrature);
            CHECK(s.value == doctest::Approx(std::pow(lambda, -t) * base.value).epsilon(1e-9));
        }
        const auto l = build_lebesgue(0.0, 1.0);
        const auto l2 = build_lebesgue(0.0, 2.0);
        CHECK(t_energy(l2, t, EnergyMethod::cylinder_quadrature).value ==
              doctest::Approx(std::pow(2.0, -t) * t_energy(l, t, EnergyMethod::cylinder_quadrature).value));
    }

    TEST_CASE("potential oracles")
    {
        const auto l = build_lebesgue(0.0, 1.0);
        CHECK(t_potential(l, 0.5, 0.5).value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
        const auto far = t_potential(build_middle_cantor(1.0 / 3.0), 5.0, 0.5);
        CHECK(far.lower >= std::pow(6.0, -0.5) - 1e-12);
        CHECK(far.upper <= std::pow(4.0, -0.5) + 1e-12);
        const auto on = t_potential(build_middle_cantor(1.0 / 3.0), 0.0, 0.5);
        CHECK(std::isfinite(on.upper));
        CHECK(on.lower > 1.0);
    }

    TEST_CASE("normalized restrictions")
    {
        const auto m = build_middle_cantor(1.0 / 3.0);
        const auto whole = restricted_normalized(m, -1.0, 2.0);
        REQUIRE(whole.runs.size() == 1);
        CHECK(whole.runs[0].level == 0);
        const auto left = restricted_normalized(m, 0.0, 1.0 / 3.0);
        CHECK(left.mass_lo == doctest::Approx(0.5));
        CHECK(left.mass_hi == doctest::Approx(0.5));
        CHECK_THROWS_AS(restricted_normalized(m, 0.34, 0.66), Error);
        try {
            restricted_normalized(m, 0.34, 0.66);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::zero_measure_restriction);
        }
        // The left third is a scaled copy: energy picks up 3^t.
        const auto e = t_energy(m, left, 0.5);
        const auto full = t_energy(m, 0.5, EnergyMethod::cylinder_quadrature);
        CHECK(e.value == doctest::Approx(std::pow(3.0, 0.5) * full.value).epsilon(1e-9));
    }

    TEST_CASE("mutual energy identities")
    {
        const auto l = build_lebesgue(0.0, 1.0);
        const double t = 0.5;
        const auto a = restricted_normalized(l, 0.0, 0.5);
        const auto b = restricted_normalized(l, 0.5, 1.0);
        const double I1 = t_energy(l, a, t).value;
        const double I2 = t_energy(l, b, t).value;
        const double J = mutual_energy(l, a, b, t).value;
        CHECK(I1 == doctest::Approx(I2));
        CHECK(0.25 * (I1 + I2 + 2 * J) == doctest::Approx(8.0 / 3.0).epsilon(1e-9));
        CHECK(mutual_energy(l, b, a, t).value == doctest::Approx(J));
        const auto m = build_middle_cantor(1.0 / 3.0);
        const auto w = whole_view(m);
        CHECK(mutual_energy(m, w, w, t).value == doctest::Approx(t_energy(m, 0.5, EnergyMethod::cylinder_quadrature).value));
        // Separated pieces: the kernel bracket bounds the mutual energy.
        const auto p = restricted_normalized(m, 0.0, 1.0 / 9.0);
        const auto q = restricted_normalized(m, 8.0 / 9.0, 1.0);
        const auto mq = mutual_energy(m, p, q, t);
        CHECK(mq.lower >= std::pow(1.0, -t) - 1e-12);
        CHECK(mq.upper <= std::pow(7.0 / 9.0, -t) + 1e-12);
    }

    TEST_CASE("capacity lower bounds")
    {
        CHECK(capacity_lower_bound(IntervalUnion::from_intervals({{0, 1}}), 0.5) == doctest::Approx(0.375));
        CHECK(capacity_lower_bound(IntervalUnion::from_intervals({{0, 1}}), 1.0) == 0.0);
        const double tiny = capacity_lower_bound(IntervalUnion::from_intervals({{0, 1e-6}}), 0.99);
        CHECK(tiny > 0.0);
        CHECK(tiny < 1e-4);
        CHECK_THROWS_AS(capacity_lower_bound(IntervalUnion{}, 0.5), Error);
    }

    TEST_CASE("certified frostman constants")
    {
        CHECK(certified_frostman_constant(build_lebesgue(0.0, 1.0), 1.0) == doctest::Approx(2.0));
        const auto m = build_middle_cantor(1.0 / 3.0);
        const double C = certified_frostman_constant(m, k_dim3);
        // Ball of radius 1/2 at the centre holds all the mass.
        CHECK(C >= std::pow(0.5, -k_dim3) - 1e-12);
        Rng rng(1);
        for (int i = 0; i < 200; ++i) {
            const double x = rng.uniform();
            const double r = std::pow(10.0, -6.0 * rng.uniform());
            CHECK(ball_mass(m, x, r).lower <= C * std::pow(r, k_dim3) * (1 + 1e-12));
        }
    }

    TEST_CASE("frostman energy check: no violations, shrunken constant violates")
    {
        const auto l = build_lebesgue(0.0, 1.0);
        Rng rng(3);
        std::vector<double> xs, rs, ts;
        for (int i = 0; i < 100; ++i) {
            xs.push_back(rng.uniform());
            rs.push_back(std::pow(10.0, -4.0 * rng.uniform()));
            ts.push_back(0.05 + 0.9 * rng.uniform());
        }
        CHECK(frostman_energy_check(l, xs, rs, ts, 2.0, 1.0).violations == 0);
        CHECK(frostman_energy_check(l, xs, rs, ts, 0.2, 1.0).violations > 0);
    }

    TEST_CASE("strict precision raises with the bracket")
    {
        EnergyOptions o;
        o.precision = 1e-9;
        o.strict = true;
        o.mc_samples = 2000;
        CHECK_THROWS_AS(t_energy(build_middle_cantor(1.0 / 3.0), 0.5, EnergyMethod::monte_carlo, o), PrecisionError);
        o.strict = false;
        const auto r = t_energy(build_middle_cantor(1.0 / 3.0), 0.5, EnergyMethod::monte_carlo, o);
        CHECK_FALSE(r.precision_reached);
    }

    TEST_CASE("consistent oscillating scheme has bounded scaled cylinder energies")
    {
        const auto o = build_oscillating_cantor(0.125, 0.25, default_block_bounds(40));
        REQUIRE(o.meta.exponent_order_consistent);
        const double t = 0.3;
        EnergyEngine engine(o, t);
        double lo = INFINITY, hi = 0;
        for (int n = 1; n <= 8; ++n) {
            const double v = engine.self_energy(n).mid() * std::pow(o.length(n), t);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi / lo <= 5.0);
    }

    TEST_CASE("method names round trip")
    {
        for (auto m : {EnergyMethod::recursive_exact, EnergyMethod::cylinder_quadrature, EnergyMethod::monte_carlo}) {
            CHECK(energy_method_from_string(to_string(m)) == m);
        }
        CHECK_THROWS_AS(energy_method_from_string("simpson"), Error);
    }
}
