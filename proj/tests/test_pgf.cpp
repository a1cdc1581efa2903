#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gwi/error.hpp"
#include "gwi/limits.hpp"
#include "gwi/pgf.hpp"
#include "support.hpp"

using namespace gwi;

namespace {

Pmf random_pmf(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& x : v)
        s += x = u(rng);
    for (auto& x : v)
        x /= s;
    return Pmf(v);
}

double total(const Pmf& p)
{
    long double s = 0.0L;
    for (double v : p.coeffs())
        s += v;
    return static_cast<double>(s);
}

} // namespace

TEST_SUITE("pgf")
{
    TEST_CASE("Pmf construction and validation")
    {
        CHECK(Pmf().size() == 1);
        CHECK(Pmf()[0] == 1.0);
        CHECK(Pmf::delta(3)[3] == 1.0);
        CHECK(Pmf({0.5, 0.25}).deficiency() == doctest::Approx(0.25));
        CHECK(Pmf({1.0, -1e-13})[1] == 0.0);
        CHECK_THROWS_AS(Pmf({1.0, -1e-6}), InvalidArgument);
        CHECK_THROWS_AS(Pmf({0.7, 0.7}), InvalidArgument);
        CHECK_THROWS_AS(Pmf({NAN}), InvalidArgument);
    }

    TEST_CASE("convolve")
    {
        const Pmf b = Pmf::bernoulli(0.5);
        const Pmf c = convolve(b, b, 10);
        REQUIRE(c.size() == 3);
        CHECK(c[0] == doctest::Approx(0.25));
        CHECK(c[1] == doctest::Approx(0.5));
        CHECK(c[2] == doctest::Approx(0.25));

        std::mt19937_64 rng(11);
        const Pmf p = random_pmf(rng, 7);
        CHECK(convolve(Pmf(), p, 20) == p);
        CHECK_THROWS_AS(convolve(p, p, 0), InvalidArgument);

        // truncation moves mass into the deficiency
        const Pmf t = convolve(p, p, 5);
        CHECK(t.size() == 5);
        CHECK(total(t) + t.deficiency() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(t.deficiency() > 0.0);
    }

    TEST_CASE("thinning then immigration by hand")
    {
        // count Bernoulli(0.4) thinned by 0.5, then + Bernoulli(0.1)
        const Pmf r = convolve(compound(Pmf::bernoulli(0.4), Pmf::bernoulli(0.5), 10), Pmf::bernoulli(0.1), 10);
        CHECK(r[0] == doctest::Approx(0.72).epsilon(1e-14));
        CHECK(r[1] == doctest::Approx(0.26).epsilon(1e-14));
        CHECK(r[2] == doctest::Approx(0.02).epsilon(1e-14));
    }

    TEST_CASE("compound")
    {
        std::mt19937_64 rng(5);
        const Pmf g = random_pmf(rng, 5);
        const Pmf q = compound(Pmf::bernoulli(0.3), Pmf::bernoulli(0.6), 8);
        CHECK(q[0] == doctest::Approx(0.82));
        CHECK(q[1] == doctest::Approx(0.18));
        CHECK(compound(Pmf::delta(1), g, 20) == g);
        const Pmf c2 = compound(Pmf::delta(2), g, 20);
        const Pmf gg = convolve(g, g, 20);
        for (std::size_t k = 0; k < 20; ++k)
            CHECK(c2[k] == doctest::Approx(gg[k]).epsilon(1e-14));
        const Pmf p = random_pmf(rng, 6);
        const Pmf id = compound(p, Pmf::delta(1), 20);
        for (std::size_t k = 0; k < 6; ++k)
            CHECK(id[k] == p[k]);
    }

    TEST_CASE("PGF composition identity for compound")
    {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 20; ++trial) {
            const Pmf a = random_pmf(rng, 6);
            const Pmf b = random_pmf(rng, 4);
            const Pmf c = compound(a, b, 64);
            REQUIRE(c.deficiency() < 1e-12);
            for (double x : {0.0, 0.2, 0.5, 0.8, 1.0})
                CHECK(std::fabs(eval(c, x) - eval(a, std::min(1.0, eval(b, x)))) < 1e-9);
            CHECK(total(c) + c.deficiency() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("eval")
    {
        std::mt19937_64 rng(2);
        CHECK(eval(random_pmf(rng, 9), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(eval(Pmf(), 0.3) == 1.0);
        CHECK(std::fabs(eval(poisson_pmf(1.0, 40), 0.5) - std::exp(-0.5)) < 1e-12);
        CHECK_THROWS_AS(eval(Pmf(), 1.5), InvalidArgument);
        CHECK_THROWS_AS(eval(Pmf(), -0.1), InvalidArgument);
    }

    TEST_CASE("factorial moments")
    {
        CHECK(factorial_moment(Pmf::bernoulli(0.3), 1) == doctest::Approx(0.3));
        CHECK(factorial_moment(Pmf::bernoulli(0.3), 2) == 0.0);
        CHECK(factorial_moment(Pmf::delta(3), 2) == 6.0);
        CHECK(std::fabs(factorial_moment(poisson_pmf(1.0, 60), 3) - 1.0) < 1e-10);
        const auto fm = factorial_moments(poisson_pmf(2.0, 80), 4);
        for (std::size_t k = 1; k <= 4; ++k)
            CHECK(fm(k) == doctest::Approx(std::pow(2.0, static_cast<double>(k))).epsilon(1e-12));

        std::mt19937_64 rng(23);
        const Pmf a = random_pmf(rng, 5), b = random_pmf(rng, 7);
        CHECK(std::fabs(factorial_moment(convolve(a, b, 20), 1) - factorial_moment(a, 1) - factorial_moment(b, 1)) <
              1e-10);
    }

    TEST_CASE("basis shift")
    {
        const auto c0 = to_centered(Pmf());
        CHECK(c0.coeffs[0] == 1.0);
        for (std::size_t l = 1; l < c0.coeffs.size(); ++l)
            CHECK(c0.coeffs[l] == 0.0);
        const auto cb = to_centered(Pmf::bernoulli(0.3));
        CHECK(cb.coeffs[0] == doctest::Approx(1.0));
        CHECK(cb.coeffs[1] == doctest::Approx(0.3));

        const Pmf p = poisson_pmf(2.0, 50);
        const Pmf back = from_centered(to_centered(p), 50);
        double err = 0.0;
        for (std::size_t k = 0; k < 50; ++k)
            err = std::max(err, std::fabs(back[k] - p[k]));
        CHECK(err <= 1e-10);

        // against direct binomial sums
        const auto c = to_centered(p);
        for (std::size_t l : {0u, 1u, 2u, 5u}) {
            long double s = 0.0L;
            for (std::size_t k = l; k < 50; ++k)
                s += testing::binom(k, l) * p[k];
            CHECK(c.coeffs[l] == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
        }
    }

    TEST_CASE("exp_power_series and exp_centered")
    {
        const auto b = exp_power_series(std::vector<double>{-1.0, 1.0}, 10);
        for (std::size_t k = 0; k < 10; ++k)
            CHECK(b[k] == doctest::Approx(std::exp(-1.0) / testing::factorial(k)).epsilon(1e-14));

        const Pmf pois = exp_centered(CenteredSeries{{0.0, 1.0}}, 30);
        CHECK(pois[0] == doctest::Approx(0.36787944117144233).epsilon(1e-15));
        CHECK(exp_centered(CenteredSeries{{0.0, 0.0, 0.0}}, 5) == Pmf({1.0, 0.0, 0.0, 0.0, 0.0}));
        CHECK_THROWS_AS(exp_centered(CenteredSeries{{0.5, 1.0}}, 5), InvalidArgument);
        // exp{-(x-1)} is not a distribution
        CHECK_THROWS_AS(exp_centered(CenteredSeries{{0.0, -1.0}}, 5), NotADistribution);

        // log of the PGF recovers the exponent
        const CenteredSeries cs{{0.0, 0.8, 0.3, 0.05}};
        const Pmf e = exp_centered(cs, 120);
        for (double x = 0.1; x < 0.95; x += 0.1) {
            const double u = x - 1.0;
            const double expo = 0.8 * u + 0.3 * u * u + 0.05 * u * u * u;
            CHECK(std::fabs(std::log(eval(e, x)) - expo) < 1e-9);
        }
    }

    TEST_CASE("mass conservation under every operation")
    {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 25; ++trial) {
            const Pmf a = random_pmf(rng, 12), b = random_pmf(rng, 9);
            for (const Pmf& r : {convolve(a, b, 10), compound(a, b, 10), convolve(a, b, 64), compound(b, a, 7)})
                CHECK(std::fabs(total(r) + r.deficiency() - 1.0) < 1e-12);
        }
    }
}
