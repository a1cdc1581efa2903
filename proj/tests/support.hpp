#pragma once

// Scenario builders and reference computations shared by the test suites.
// The oracles below use only the standard library: no gwi arithmetic.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gwi/models.hpp"
#include "gwi/scenario_io.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(GWI_FIXTURE_DIR) + "/" + name + ".scn"; }

inline gwi::ScenarioSpec load(const std::string& name) { return gwi::load_scenario(fixture(name)); }

// rho_n = 1 - c (n + n0)^{-gamma}
inline gwi::ScenarioSpec make_spec(gwi::OffspringKind off, double c, double gamma, double n0, double nu,
                                   gwi::ImmigrationKind imm, gwi::SequenceRule rate)
{
    gwi::ScenarioSpec s;
    s.name = "test";
    s.offspring.kind = off;
    s.offspring.rho = {c, gamma, n0};
    s.offspring.nu = nu;
    s.immigration.kind = imm;
    s.immigration.rate = rate;
    s.declared.divergent = gamma <= 1.0;
    return s;
}

inline gwi::SequenceRule proportional(double a)
{
    gwi::SequenceRule r;
    r.kind = gwi::SequenceRule::Kind::proportional;
    r.a = a;
    return r;
}

inline gwi::SequenceRule constant(double a)
{
    gwi::SequenceRule r;
    r.kind = gwi::SequenceRule::Kind::constant;
    r.a = a;
    return r;
}

// Law of X_n for Bernoulli offspring and Bernoulli immigration by explicit
// binomial thinning: X_n = Bin(X_{n-1}, rho_n) + Bernoulli(m_n). Support
// truncated at K; long double throughout.
inline std::vector<long double> thinning_law(const std::vector<double>& rho, const std::vector<double>& m,
                                             std::size_t K)
{
    std::vector<long double> p(K, 0.0L);
    p[0] = 1.0L;
    for (std::size_t g = 0; g < rho.size(); ++g) {
        const long double r = rho[g];
        std::vector<long double> thinned(K, 0.0L);
        for (std::size_t x = 0; x < K; ++x) {
            if (p[x] == 0.0L)
                continue;
            // Bin(x, r) by the multiplicative recurrence over i
            long double b = std::pow(1.0L - r, static_cast<long double>(x));
            if (r == 1.0L) {
                thinned[x] += p[x];
                continue;
            }
            for (std::size_t i = 0; i <= x; ++i) {
                thinned[i] += p[x] * b;
                b *= static_cast<long double>(x - i) / static_cast<long double>(i + 1) * r / (1.0L - r);
            }
        }
        const long double q = m[g];
        std::vector<long double> next(K, 0.0L);
        for (std::size_t x = 0; x < K; ++x) {
            next[x] += thinned[x] * (1.0L - q);
            if (x + 1 < K)
                next[x + 1] += thinned[x] * q;
        }
        p = std::move(next);
    }
    return p;
}

// Dense polynomial with integer coefficients (exact for the sizes used).
using IntPoly = std::vector<std::int64_t>;

inline IntPoly poly_mul(const IntPoly& a, const IntPoly& b)
{
    IntPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

// h^{(k)}(1) for integer polynomial h, computed exactly.
inline long double poly_deriv_at_1(const IntPoly& h, std::size_t k)
{
    long double s = 0.0L;
    for (std::size_t m = k; m < h.size(); ++m) {
        long double f = 1.0L;
        for (std::size_t i = 0; i < k; ++i)
            f *= static_cast<long double>(m - i);
        s += f * static_cast<long double>(h[m]);
    }
    return s;
}

// Binomial coefficient by exact integer recurrence.
inline double binom(std::size_t n, std::size_t k)
{
    long double r = 1.0L;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return static_cast<double>(r);
}

inline double factorial(std::size_t n)
{
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i)
        f *= static_cast<double>(i);
    return f;
}

// sum |a - b| / 2 over a common support, with the missing mass of each side.
template <class A, class B>
double tv_oracle(const A& a, const B& b)
{
    const std::size_t n = std::max(a.size(), b.size());
    long double s = 0.0L, ma = 0.0L, mb = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
        const long double x = k < a.size() ? static_cast<long double>(a[k]) : 0.0L;
        const long double y = k < b.size() ? static_cast<long double>(b[k]) : 0.0L;
        s += std::fabs(x - y);
        ma += x;
        mb += y;
    }
    return static_cast<double>(0.5L * (s + std::fabs((1.0L - ma) - (1.0L - mb))));
}

} // namespace testing
