// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gwi/cli.hpp"
#include "gwi/diagnostics.hpp"
#include "gwi/engine.hpp"
#include "gwi/lf.hpp"
#include "gwi/limits.hpp"
#include "support.hpp"

using namespace gwi;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void require(Outcome& o, bool ok, const std::string& what)
{
    if (!ok) {
        o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + what;
    }
}

Outcome criterion1()
{
    Outcome o;
    const ScenarioSpec s = testing::load("lf_crosscheck");
    const auto st = propagate(s, 50, 400);
    double worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double x = i / 10.0;
        worst = std::max(worst, std::fabs(exact_Fn_lf(s, 50, x) - eval(st.pmf, x)));
    }
    require(o, worst <= 1e-8, "max |exact - propagated| = " + fmt("%.3g", worst));
    o.detail = o.pass ? "max error " + fmt("%.3g", worst) : o.detail;
    return o;
}

Outcome criterion2()
{
    Outcome o;
    const ScenarioSpec s = testing::load("thm1_poisson");
    const std::vector<std::size_t> grid{100, 1000, 10000};
    const auto states = propagate_grid(s, grid, 64);
    const auto limit = poisson_pmf(2.0, 64);
    std::vector<double> tv;
    for (const auto& st : states)
        tv.push_back(tv_distance(st.pmf, limit));
    require(o, tv[0] > tv[1] && tv[1] > tv[2], "TV not strictly decreasing");
    require(o, tv[2] <= 0.02, "TV at n = 1e4 is " + fmt("%.4g", tv[2]));

    // binomial thinning oracle at the first grid point
    std::vector<double> rho, m;
    for (std::size_t j = 1; j <= 100; ++j) {
        rho.push_back(s.rho(j));
        m.push_back(s.immigration_mean(j));
    }
    const auto oracle = testing::thinning_law(rho, m, 64);
    const double agree = testing::tv_oracle(states[0].pmf.coeffs(), oracle);
    require(o, agree < 1e-12, "thinning oracle disagrees by " + fmt("%.3g", agree));
    if (o.pass)
        o.detail = "TV " + fmt("%.4g", tv[0]) + " > " + fmt("%.4g", tv[1]) + " > " + fmt("%.4g", tv[2]);
    return o;
}

Outcome criterion3()
{
    Outcome o;
    const ScenarioSpec s = testing::load("thm5_nb");
    const std::vector<std::size_t> grid{100, 300, 1000};
    const auto states = propagate_grid(s, grid, 128);
    const auto limit = nb_pmf(nb_from_scenario(1.0, 1.0), 128);
    std::vector<double> tv;
    for (const auto& st : states)
        tv.push_back(tv_distance(st.pmf, limit));
    require(o, tv[0] > tv[1] && tv[1] > tv[2], "TV not decreasing");
    require(o, tv[2] <= 0.05, "TV at n = 1e3 is " + fmt("%.4g", tv[2]));
    const auto sums = weighted_deriv_sums(s, 2000, 3);
    std::string ks;
    for (std::size_t k = 1; k <= 3; ++k) {
        const double target = asymptotic_deriv_k(1.0, 1.0, k);
        const double rel = std::fabs(sums[k - 1] - target) / target;
        require(o, rel <= 0.05, "k = " + std::to_string(k) + " relative gap " + fmt("%.3g", rel));
        ks += " k" + std::to_string(k) + ":" + fmt("%.3g", rel);
    }
    if (o.pass)
        o.detail = "TV at 1e3 " + fmt("%.4g", tv[2]) + "; derivative sums rel gap" + ks;
    return o;
}

Outcome criterion4()
{
    Outcome o;
    const ScenarioSpec e1 = testing::load("thm6_example1");
    double worst = 0.0;
    for (double x : {0.0, 0.25, 0.5, 0.75, 0.95})
        worst = std::max(worst, std::fabs(product_law_eval(e1, x, e1.run.tol) - example1_closed_form(x)));
    require(o, worst <= 1e-6, "sine product max error " + fmt("%.3g", worst));
    const ScenarioSpec e2 = testing::load("thm6_example2");
    const double mean = product_law_moments(e2, e2.run.tol).m1;
    const double gap = std::fabs(mean - std::numbers::pi * std::numbers::pi / 6.0);
    require(o, gap <= 1e-6, "Poisson product mean gap " + fmt("%.3g", gap));
    if (o.pass)
        o.detail = "sine product max error " + fmt("%.3g", worst) + "; Poisson product mean gap " + fmt("%.3g", gap);
    return o;
}

Outcome criterion5()
{
    Outcome o;
    const std::vector<double> lambdas{2.0, 1.0, 0.0};
    const auto mu = cp_intensity_finite(lambdas);
    require(o, mu.atoms.size() == 2 && std::fabs(mu.atoms[0] - 1.0) < 1e-15 && std::fabs(mu.atoms[1] - 0.5) < 1e-15,
            "cp_intensity_finite((2,1,0)) != (1, 0.5)");
    double worst_tv = 0.0;
    for (auto [lambda, nu] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
        LambdaRule r;
        r.kind = LambdaRule::Kind::negative_binomial;
        r.lambda = lambda;
        r.nu = nu;
        const auto g = general_limit_pmf(r, 200);
        const auto nb = nb_pmf(nb_from_scenario(lambda, nu), 200);
        worst_tv = std::max(worst_tv, tv_distance(g, nb));
    }
    require(o, worst_tv <= 1e-9, "general vs NB TV " + fmt("%.3g", worst_tv));

    const ScenarioSpec l2 = testing::load("thm4_log2");
    const auto atoms = log2_intensity_measure(128);
    double worst = 0.0;
    for (double x : l2.run.x_grid)
        worst = std::max(worst, std::fabs(compound_poisson_pgf(atoms, x) -
                                          std::exp(centered_exponent(l2.declared.lambda_l, x))));
    require(o, worst <= 1e-8, "log2 CP vs centered gap " + fmt("%.3g", worst));
    if (o.pass)
        o.detail = "general vs NB TV " + fmt("%.3g", worst_tv) + "; log2 paths gap " + fmt("%.3g", worst);
    return o;
}

Outcome criterion6()
{
    Outcome o;
    const char* all[] = {"thm1_poisson", "thm3_cp_finite", "thm4_log2",    "thm5_nb",
                         "thm6_example1", "thm6_example2", "lf_crosscheck"};
    std::size_t checks = 0;
    auto check = [&](bool ok, const std::string& what) {
        ++checks;
        require(o, ok, what);
    };

    // mass conservation
    for (const char* name : all) {
        const ScenarioSpec s = testing::load(name);
        if (name == std::string("thm6_example1"))
            continue; // formal H_1; no coefficient law
        const auto st = propagate(s, 200, 128);
        double mass = 0.0;
        for (double v : st.pmf.coeffs())
            mass += v;
        check(std::fabs(mass + st.pmf.deficiency() - 1.0) <= 1e-12, std::string("mass ") + name);
    }

    // Gbar' product identity and Toeplitz telescoping
    for (const char* name : all) {
        const ScenarioSpec s = testing::load(name);
        const std::size_t n = 1000;
        const auto t = composed_derivs_second_order(s, n, 1);
        long double p = 1.0L, pd = 1.0L;
        double worst = 0.0;
        for (std::size_t j = n + 1; j-- > 0;) {
            worst = std::max(worst, std::fabs(t(j, 1) - static_cast<double>(p)));
            if (j > 0) {
                p *= static_cast<long double>(s.rho(j));
                pd *= 1.0L - static_cast<long double>(s.deficit(j));
            }
        }
        check(worst <= 1e-12, std::string("rho product identity ") + name);
        const double tele = std::fabs(toeplitz_weights(s, n).rho_sum - (1.0 - static_cast<double>(pd)));
        check(tele <= 1e-14, std::string("Toeplitz telescoping ") + name + " " + fmt("%.3g", tele));
    }

    // sandwich bounds
    for (const char* name : all) {
        const ScenarioSpec s = testing::load(name);
        for (std::size_t n : {10u, 200u})
            for (int g = 0; g <= 10; ++g) {
                const double x = g / 10.0;
                const auto sw = sandwich_bounds(s, n, x);
                const auto gbar = gbar_eval_all(s, n, x);
                bool ok = true;
                for (std::size_t j = 0; j <= n; ++j)
                    ok = ok && sw[j].lower <= gbar[j] + 1e-14 && gbar[j] <= sw[j].upper + 1e-14;
                check(ok, std::string("sandwich ") + name);
            }
    }

    // a_{k,i} identity
    for (std::size_t k = 2; k <= 12; ++k) {
        const double lhs = testing::factorial(k + 1) / std::ldexp(1.0, static_cast<int>(k));
        double rhs = 0.0;
        for (std::size_t i = 1; i <= (k + 2) / 2; ++i)
            rhs += a_coefficient(k + 1, i) * testing::factorial(i) / std::ldexp(1.0, static_cast<int>(i) - 1) *
                   testing::factorial(k + 1 - i) / std::ldexp(1.0, static_cast<int>(k - i));
        rhs /= static_cast<double>(k);
        check(std::fabs(rhs - lhs) <= 1e-12 * lhs, "a_{k,i} identity k = " + std::to_string(k));
    }

    // Faa di Bruno f'' coefficient against (g - g(1))^2 / 2 differentiated exactly
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> coef(-5, 5);
    for (int trial = 0; trial < 100; ++trial) {
        testing::IntPoly g(4);
        std::int64_t g1 = 0;
        for (auto& c : g) {
            c = coef(rng);
            g1 += c;
        }
        testing::IntPoly centered = g;
        centered[0] -= g1;
        const auto sq = testing::poly_mul(centered, centered);
        std::vector<double> d;
        for (std::size_t i = 1; i <= 6; ++i)
            d.push_back(static_cast<double>(testing::poly_deriv_at_1(g, i)));
        for (std::size_t k = 2; k <= 6; ++k) {
            const double brute = static_cast<double>(testing::poly_deriv_at_1(sq, k) / 2.0L);
            check(std::fabs(faa_coefficient_f2(d, k) - brute) <= 1e-9 * std::max(1.0, std::fabs(brute)),
                  "Faa di Bruno k = " + std::to_string(k));
        }
    }

    // accompanying gap bound on Bernoulli-immigration fixtures
    for (const char* name : all) {
        const ScenarioSpec s = testing::load(name);
        if (s.immigration.kind != ImmigrationKind::bernoulli)
            continue;
        for (std::size_t n : {1u, 50u, 500u})
            for (int g = 0; g <= 10; ++g) {
                const double x = g / 10.0;
                const double gap = std::fabs(fn_product_eval(s, n, x) - accompanying_eval(s, n, x));
                check(gap <= accompanying_gap_bound(s, n, x) + 1e-15, std::string("gap bound ") + name);
            }
    }
    if (o.pass)
        o.detail = std::to_string(checks) + " invariant checks";
    return o;
}

Outcome criterion7()
{
    Outcome o;
    const ScenarioSpec s = testing::load("thm1_poisson");
    const auto exact = propagate(s, 200, 64);
    const auto emp = simulate(s, 200, 1000000, s.run.seed);
    const double tv = tv_distance(emp, exact.pmf);
    require(o, tv <= 0.005, "MC TV " + fmt("%.4g", tv));

    RunConfig c;
    c.scenario = testing::fixture("thm1_poisson");
    c.command = Command::simulate;
    c.n = 200;
    c.reps = 100000;
    c.seed = 12345;
    std::ostringstream a, b, err;
    const int ra = run(c, a, err), rb = run(c, b, err);
    require(o, ra == 0 && rb == 0 && !a.str().empty() && a.str() == b.str(), "simulate output not byte-identical");
    if (o.pass)
        o.detail = "MC TV " + fmt("%.4g", tv) + "; identical bytes on rerun";
    return o;
}

Outcome criterion8()
{
    Outcome o;
    const double tv = tv_distance(nb_pmf(nb_from_scenario(1.0, 1e-6), 64), poisson_pmf(1.0, 64));
    require(o, tv <= 1e-5, "TV " + fmt("%.3g", tv));
    if (o.pass)
        o.detail = "TV " + fmt("%.3g", tv);
    return o;
}

} // namespace

int main()
{
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %zu: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
