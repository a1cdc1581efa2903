#include "gwi/lf.hpp"

#include <cfloat>
#include <cmath>
#include <string>

#include "gwi/error.hpp"

namespace gwi {

namespace {

void require_closed_form(const ScenarioSpec& spec)
{
    const auto k = spec.offspring.kind;
    if (k != OffspringKind::linear_fractional && k != OffspringKind::bernoulli)
        throw UnsupportedFamily("closed-form composition needs linear fractional or Bernoulli offspring");
}

void require_bernoulli_immigration(const ScenarioSpec& spec)
{
    if (spec.immigration.kind != ImmigrationKind::bernoulli)
        throw UnsupportedFamily("exact linear fractional F_n needs Bernoulli immigration");
}

// A composed map whose derivative at 1 vanishes is the constant 1.
LinearFractional from_derivs_or_constant(double d1, double d2)
{
    if (d1 == 0.0)
        return {0.0, 0.0};
    return lf_from_derivatives(d1, d2);
}

double binom(std::size_t n, std::size_t k)
{
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

} // namespace

LinearFractional gbar_lf(const ScenarioSpec& spec, std::size_t j, std::size_t n)
{
    require_closed_form(spec);
    if (j > n)
        throw InvalidArgument("gbar_lf needs j <= n");
    if (j == n)
        return LinearFractional::identity();
    const RhoChain chain(spec.offspring, n);
    double d2 = 0.0;
    for (std::size_t i = j + 1; i <= n; ++i) {
        const double g2 = offspring_deriv_at_1(spec.offspring, i, 2);
        if (g2 == 0.0)
            continue;
        const double head = std::exp(chain.log_prod(j) - chain.log_prod(i - 1)); // rho_{[j,i-1]}
        const double tail = chain.prod(i);                                        // rho_{[i,n]}
        d2 += g2 * head * tail * tail;
    }
    return from_derivs_or_constant(chain.prod(j), d2);
}

std::vector<LinearFractional> gbar_lf_all(const ScenarioSpec& spec, std::size_t n)
{
    require_closed_form(spec);
    const RhoChain chain(spec.offspring, n);
    std::vector<LinearFractional> out(n + 1);
    // s = Gbar''_{j+1,n}(1); Gbar''_{j,n}(1) = G_j''(1) rho_{[j,n]}^2 + rho_j Gbar''_{j+1,n}(1)
    double s = 0.0;
    out[n] = LinearFractional::identity();
    for (std::size_t j = n; j-- > 0;) {
        const std::size_t l = j + 1;
        const double p = chain.prod(l);
        s = offspring_deriv_at_1(spec.offspring, l, 2) * p * p + chain.rho(l) * s;
        out[j] = from_derivs_or_constant(chain.prod(j), s);
    }
    return out;
}

double exact_Fn_lf(const ScenarioSpec& spec, std::size_t n, double x)
{
    require_bernoulli_immigration(spec);
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    const auto maps = gbar_lf_all(spec, n);
    double f = 1.0;
    for (std::size_t j = 1; j <= n; ++j)
        f *= 1.0 + spec.immigration_mean(j) * (maps[j](x) - 1.0);
    return f;
}

double accompanying_lf(const ScenarioSpec& spec, std::size_t n, double x)
{
    require_bernoulli_immigration(spec);
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    const auto maps = gbar_lf_all(spec, n);
    double s = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
        s += spec.immigration_mean(j) * (maps[j](x) - 1.0);
    return std::exp(s);
}

double a_coefficient(std::size_t k, std::size_t i)
{
    if (i == 0 || 2 * i > k)
        return 0.0;
    if (2 * i == k)
        return binom(k, i) / 2.0;
    return binom(k, i);
}

const std::array<std::array<double, faa_k_max + 1>, faa_k_max + 1>& a_table()
{
    static const auto table = [] {
        std::array<std::array<double, faa_k_max + 1>, faa_k_max + 1> t{};
        for (std::size_t k = 0; k <= faa_k_max; ++k)
            for (std::size_t i = 0; i <= faa_k_max; ++i)
                t[k][i] = a_coefficient(k, i);
        return t;
    }();
    return table;
}

double faa_coefficient_f2(std::span<const double> g_derivs, std::size_t k)
{
    if (k < 2)
        throw InvalidArgument("f'' appears only from the second derivative on");
    if (g_derivs.size() < k - 1)
        throw InvalidArgument("need g^{(1)}..g^{(" + std::to_string(k - 1) + ")}");
    const auto& a = a_table();
    double s = 0.0;
    for (std::size_t i = 1; 2 * i <= k; ++i) {
        const double aki = k <= faa_k_max ? a[k][i] : a_coefficient(k, i);
        s += aki * g_derivs[i - 1] * g_derivs[k - i - 1];
    }
    return s;
}

std::vector<std::vector<double>> partial_bell(std::span<const double> x, std::size_t k_max)
{
    // B_{k,s} = sum_{i=1}^{k-s+1} C(k-1, i-1) x_i B_{k-i,s-1}
    std::vector<std::vector<double>> b(k_max + 1, std::vector<double>(k_max + 1, 0.0));
    b[0][0] = 1.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
        for (std::size_t s = 1; s <= k; ++s) {
            double v = 0.0;
            double c = 1.0; // C(k-1, i-1)
            for (std::size_t i = 1; i + s <= k + 1; ++i) {
                if (i > 1)
                    c = c * static_cast<double>(k - i + 1) / static_cast<double>(i - 1);
                v += c * x[i - 1] * b[k - i][s - 1];
            }
            b[k][s] = v;
        }
    }
    return b;
}

DerivTable::DerivTable(std::size_t n, std::size_t k_max)
    : n_(n), k_max_(k_max), values_((n + 1) * k_max, 0.0)
{
    if (k_max == 0)
        throw InvalidArgument("derivative table needs k_max >= 1");
}

DerivTable composed_derivs(const ScenarioSpec& spec, std::size_t n, std::size_t k_max)
{
    DerivTable t(n, k_max);
    t.at(n, 1) = 1.0; // Gbar_{n+1,n}(x) = x
    std::vector<double> inner(k_max), g(k_max + 1);
    for (std::size_t l = n; l >= 1; --l) {
        for (std::size_t k = 1; k <= k_max; ++k)
            inner[k - 1] = t(l, k);
        for (std::size_t s = 1; s <= k_max; ++s)
            g[s] = offspring_deriv_at_1(spec.offspring, l, s);
        const auto bell = partial_bell(inner, k_max);
        for (std::size_t k = 1; k <= k_max; ++k) {
            double v = 0.0;
            for (std::size_t s = 1; s <= k; ++s)
                if (g[s] != 0.0)
                    v += g[s] * bell[k][s];
            t.at(l - 1, k) = v;
        }
    }
    return t;
}

DerivTable composed_derivs_second_order(const ScenarioSpec& spec, std::size_t n, std::size_t k_max)
{
    DerivTable t(n, k_max);
    t.at(n, 1) = 1.0;
    std::vector<double> inner(k_max);
    for (std::size_t l = n; l >= 1; --l) {
        for (std::size_t k = 1; k <= k_max; ++k)
            inner[k - 1] = t(l, k);
        const double rho = offspring_deriv_at_1(spec.offspring, l, 1);
        const double g2 = offspring_deriv_at_1(spec.offspring, l, 2);
        for (std::size_t k = 1; k <= k_max; ++k) {
            double v = rho * inner[k - 1];
            if (k >= 2 && g2 != 0.0)
                v += g2 * faa_coefficient_f2(inner, k);
            t.at(l - 1, k) = v;
        }
    }
    return t;
}

double composed_deriv_k(const ScenarioSpec& spec, std::size_t j, std::size_t n, std::size_t k)
{
    if (j > n)
        throw InvalidArgument("composed_deriv_k needs j <= n");
    if (k == 0)
        throw InvalidArgument("derivative order must be at least 1");
    if (k == 1)
        return RhoChain(spec.offspring, n).prod(j);
    return composed_derivs(spec, n, k)(j, k);
}

double asymptotic_deriv_k(double lambda, double nu, std::size_t k)
{
    if (k == 0)
        throw InvalidArgument("derivative order must be at least 1");
    if (!(lambda >= 0.0) || !(nu > 0.0))
        throw InvalidArgument("asymptotic derivative needs lambda >= 0 and nu > 0");
    if (lambda == 0.0)
        return 0.0;
    const double km1 = static_cast<double>(k - 1);
    const double log_value = std::lgamma(static_cast<double>(k)) + std::log(lambda) + km1 * std::log(nu / 2.0);
    if (log_value > std::log(DBL_MAX))
        throw NumericError("(k-1)! lambda (nu/2)^{k-1} overflows at k = " + std::to_string(k));
    double v = lambda;
    for (std::size_t i = 1; i < k; ++i)
        v *= static_cast<double>(i) * nu / 2.0;
    return v;
}

std::vector<double> weighted_deriv_sums(const ScenarioSpec& spec, std::size_t n, std::size_t k_max)
{
    const auto t = composed_derivs(spec, n, k_max);
    std::vector<double> out(k_max, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        const double m = spec.immigration_mean(j);
        for (std::size_t k = 1; k <= k_max; ++k)
            out[k - 1] += m * t(j, k);
    }
    return out;
}

} // namespace gwi
