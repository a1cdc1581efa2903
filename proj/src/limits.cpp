#include "gwi/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gwi/detail/compensated.hpp"
#include "gwi/error.hpp"

namespace gwi {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double negative_atom_tol = 1e-12;
constexpr std::size_t settle_run = 30;
constexpr std::size_t series_term_cap = std::size_t{1} << 20;
constexpr std::size_t cp_term_cap = std::size_t{1} << 23;

double checked_atom(double v, std::size_t j)
{
    if (v < -negative_atom_tol)
        throw NotADistribution("intensity atom mu{" + std::to_string(j) + "} = " + std::to_string(v) +
                               " is negative");
    return std::max(v, 0.0);
}

// (log2 - sum_{k<j} 1/(k 2^k)) summed as the tail sum_{k>=j} 1/(k 2^k).
double log2_tail(std::size_t j)
{
    double s = 0.0;
    double p = std::ldexp(1.0, -static_cast<int>(j));
    for (std::size_t k = j; p > 0.0; ++k, p *= 0.5) {
        const double t = p / static_cast<double>(k);
        s += t;
        if (t < s * 1e-18)
            break;
    }
    return s;
}

// Upper bound on sum_{j > J} rule(j) by comparison with an integral.
double sequence_tail_bound(const SequenceRule& rule, const OffspringFamily& fam, std::size_t J)
{
    const double dJ = static_cast<double>(J);
    switch (rule.kind) {
    case SequenceRule::Kind::constant:
        return rule.a == 0.0 ? 0.0 : inf;
    case SequenceRule::Kind::proportional: {
        if (rule.a == 0.0)
            return 0.0;
        if (fam.kind == OffspringKind::custom || fam.rho.divergent())
            return inf;
        const double g = fam.rho.gamma;
        return std::fabs(rule.a) * fam.rho.c * std::pow(dJ + fam.rho.n0, 1.0 - g) / (g - 1.0);
    }
    case SequenceRule::Kind::power_sum: {
        double s = 0.0;
        for (const auto& t : rule.terms) {
            if (t.coef <= 0.0)
                continue;
            if (t.exponent >= -1.0)
                return inf;
            s += t.coef * std::pow(dJ, t.exponent + 1.0) / (-t.exponent - 1.0);
        }
        return s;
    }
    }
    return inf;
}

double immigration_tail_bound(const ScenarioSpec& spec, std::size_t J)
{
    double scale = 1.0;
    if (spec.immigration.kind == ImmigrationKind::custom) {
        scale = 0.0;
        for (std::size_t k = 1; k < spec.immigration.base.size(); ++k)
            scale += static_cast<double>(k) * spec.immigration.base[k];
    }
    return scale * sequence_tail_bound(spec.immigration.rate, spec.offspring, J);
}

void require_convergent(const ScenarioSpec& spec)
{
    if (spec.declared.divergent)
        throw WrongRegime("the infinite-product law needs sum (1 - rho_n) < infinity; the scenario declares it divergent");
    if (spec.offspring.divergent())
        throw WrongRegime("the infinite-product law needs sum (1 - rho_n) < infinity");
    if (!summable(spec.immigration.rate, spec.offspring))
        throw WrongRegime("the infinite-product law needs sum m_{n,1} < infinity");
}

constexpr double tail_slack = 1.1;
constexpr std::size_t max_depth = std::size_t{1} << 31;

// Smallest power of two J with tail_slack * scale * sum_{j>J} m_{j,1} <= tol.
std::size_t product_terms(const ScenarioSpec& spec, double scale, double tol)
{
    std::size_t J = 1;
    while (tail_slack * scale * immigration_tail_bound(spec, J) > tol) {
        if (J >= max_depth)
            throw NumericError("immigration tail too heavy for the requested tolerance");
        J *= 2;
    }
    return J;
}

// prod_{j <= J} H_j(Gbar_{j+1,N}(x)) in one backward sweep.
double truncated_product(const ScenarioSpec& spec, double x, std::size_t J, std::size_t N)
{
    double y = x;
    double prod = 1.0;
    for (std::size_t j = N; j >= 1; --j) {
        if (j <= J)
            prod *= spec.immigration_pgf(j, y);
        y = offspring_pgf_at(spec.offspring, j, y);
    }
    return prod;
}

LimitMoments truncated_moments(const ScenarioSpec& spec, std::size_t J, std::size_t N)
{
    // At step j: p = rho_{[j,N]}, d2 = Gbar''_{j+1,N}(1).
    double p = 1.0;
    double d2 = 0.0;
    detail::CompensatedSum m1;
    detail::CompensatedSum logg2;
    for (std::size_t j = N; j >= 1; --j) {
        if (j <= J) {
            const double a1 = spec.immigration_moment(j, 1);
            const double a2 = spec.immigration_moment(j, 2);
            m1 += a1 * p;
            logg2 += (a2 - a1 * a1) * p * p + a1 * d2;
        }
        const double rho = spec.rho(j);
        d2 = offspring_deriv_at_1(spec.offspring, j, 2) * p * p + rho * d2;
        p *= rho;
    }
    const double mean = m1.value();
    return {mean, logg2.value() + mean * mean};
}

} // namespace

Pmf poisson_pmf(double lambda, std::size_t K)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("Poisson mean must be finite and nonnegative");
    if (K == 0)
        throw InvalidArgument("truncation length K must be positive");
    std::vector<double> p(K);
    p[0] = std::exp(-lambda);
    for (std::size_t k = 1; k < K; ++k)
        p[k] = p[k - 1] * lambda / static_cast<double>(k);
    return Pmf(std::move(p));
}

IntensityMeasure cp_intensity_finite(std::span<const double> lambdas)
{
    const std::size_t J = lambdas.size();
    if (J < 2)
        throw InvalidArgument("finite intensity needs lambda_1..lambda_J with J >= 2");
    if (lambdas.back() != 0.0)
        throw InvalidArgument("finite intensity needs lambda_J = 0");
    for (std::size_t n = 1; n < J; ++n)
        if (lambdas[n] == 0.0)
            for (std::size_t m = n + 1; m < J; ++m)
                if (lambdas[m] != 0.0)
                    throw InvalidArgument("lambda_" + std::to_string(n + 1) + " = 0 forces lambda_m = 0 for m > " +
                                          std::to_string(n + 1));
    IntensityMeasure mu;
    mu.atoms.resize(J - 1);
    for (std::size_t j = 1; j < J; ++j) {
        detail::CompensatedSum s;
        double inv_fact_i = 1.0;
        for (std::size_t i = 0; i + j < J; ++i) {
            if (i > 0)
                inv_fact_i /= static_cast<double>(i);
            s += (i % 2 ? -1.0 : 1.0) * inv_fact_i * lambdas[j + i - 1];
        }
        mu.atoms[j - 1] = checked_atom(s.value() / std::tgamma(static_cast<double>(j) + 1.0), j);
    }
    return mu;
}

IntensityMeasure cp_intensity_series(const LambdaRule& rule, double tol, std::size_t j_max)
{
    if (!rule.declared())
        throw InvalidArgument("no lambda_l rule declared");
    if (!(tol > 0.0) || j_max == 0)
        throw InvalidArgument("series intensity needs tol > 0 and j_max >= 1");
    IntensityMeasure mu;
    mu.atoms.resize(j_max);
    for (std::size_t j = 1; j <= j_max; ++j) {
        // term_i = (-1)^i C(j+i, i) c_{j+i}
        detail::CompensatedSum s;
        double binom = 1.0;
        double prev = inf;
        double prev_sum = 0.0;
        double value = 0.0;
        std::size_t settled = 0;
        bool converged = false;
        std::size_t i = 0;
        for (; i < cp_term_cap; ++i) {
            if (i > 0)
                binom *= static_cast<double>(j + i) / static_cast<double>(i);
            const double t = (i % 2 ? -1.0 : 1.0) * binom * rule.centered(j + i);
            if (!std::isfinite(t))
                break;
            prev_sum = s.value();
            s += t;
            const bool decreasing = std::fabs(t) <= std::fabs(prev);
            const bool small = std::fabs(t) < tol;
            const bool alternating_small =
                (t < 0.0) != (prev < 0.0) && std::fabs(std::fabs(t) - std::fabs(prev)) < tol;
            settled = (decreasing && (small || alternating_small)) ? settled + 1 : 0;
            prev = t;
            if (settled >= settle_run) {
                converged = true;
                value = small ? s.value() : 0.5 * (s.value() + prev_sum);
                break;
            }
        }
        if (!converged)
            throw SeriesDivergence("compound Poisson series for mu{" + std::to_string(j) + "} does not converge");
        mu.terms_used = std::max(mu.terms_used, i + 1);
        mu.atoms[j - 1] = checked_atom(value, j);
    }
    // sum_j j mu{j} = lambda_1 bounds the mass beyond j_max.
    double first = 0.0;
    for (std::size_t j = 1; j <= j_max; ++j)
        first += static_cast<double>(j) * mu.atoms[j - 1];
    mu.tail_bound = std::max(0.0, rule.value(1) - first) / static_cast<double>(j_max + 1);
    return mu;
}

double log2_intensity(std::size_t j)
{
    if (j == 0)
        throw InvalidArgument("intensity atoms are indexed from j = 1");
    return log2_tail(j) / static_cast<double>(j);
}

IntensityMeasure log2_intensity_measure(std::size_t j_max)
{
    IntensityMeasure mu;
    mu.atoms.resize(j_max);
    for (std::size_t j = 1; j <= j_max; ++j)
        mu.atoms[j - 1] = log2_intensity(j);
    const double J1 = static_cast<double>(j_max + 1);
    mu.tail_bound = 2.0 / (J1 * J1) * std::ldexp(1.0, -static_cast<int>(j_max));
    return mu;
}

Pmf compound_poisson_pmf(const IntensityMeasure& mu, std::size_t K)
{
    if (K == 0)
        throw InvalidArgument("truncation length K must be positive");
    std::vector<double> a(K, 0.0);
    a[0] = -mu.total();
    for (std::size_t j = 1; j < K && j <= mu.atoms.size(); ++j)
        a[j] = mu.atoms[j - 1];
    return pmf_from_series(exp_power_series(a, K), "compound Poisson law");
}

double compound_poisson_pgf(const IntensityMeasure& mu, double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    const double lx = x > 0.0 ? std::log(x) : -inf;
    detail::CompensatedSum s;
    for (std::size_t j = 1; j <= mu.atoms.size(); ++j)
        s += mu.atoms[j - 1] * (x > 0.0 ? std::expm1(static_cast<double>(j) * lx) : -1.0);
    return std::exp(s.value());
}

double centered_exponent(const LambdaRule& rule, double x, double tol)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    const double u = x - 1.0;
    if (u == 0.0)
        return 0.0;
    detail::CompensatedSum s;
    if (rule.finite()) {
        double p = 1.0;
        for (std::size_t l = 1; l <= rule.values.size(); ++l) {
            p *= u;
            s += rule.centered(l) * p;
        }
        return s.value();
    }
    double p = 1.0;
    double prev_t = inf;
    double prev_sum = 0.0;
    std::size_t settled = 0;
    for (std::size_t l = 1; l < series_term_cap * 16; ++l) {
        p *= u;
        const double t = rule.centered(l) * p;
        if (!std::isfinite(t))
            break;
        prev_sum = s.value();
        s += t;
        const bool decreasing = std::fabs(t) < std::fabs(prev_t);
        const bool small = std::fabs(t) < tol;
        const bool alternating_small =
            (t < 0.0) != (prev_t < 0.0) && std::fabs(std::fabs(t) - std::fabs(prev_t)) < tol;
        settled = (decreasing && (small || alternating_small)) ? settled + 1 : 0;
        prev_t = t;
        if (settled >= settle_run)
            // alternating tail: the mean of consecutive partial sums
            return small ? s.value() : 0.5 * (s.value() + prev_sum);
    }
    throw SeriesDivergence("centered exponent series does not converge at x = " + std::to_string(x));
}

PowerBasisExpansion centered_rule_to_power_basis(const LambdaRule& rule, std::size_t K, double tol)
{
    if (K == 0)
        throw InvalidArgument("truncation length K must be positive");
    PowerBasisExpansion out;
    if (rule.finite() || !rule.declared()) {
        CenteredSeries c;
        c.coeffs.assign(rule.values.size() + 1, 0.0);
        for (std::size_t l = 1; l <= rule.values.size(); ++l)
            c.coeffs[l] = rule.centered(l);
        out.coeffs = to_power_basis(c, K);
        out.terms_used = rule.values.size();
        return out;
    }

    // a_k = sum_{l >= max(k,1)} c_l C(l,k) (-1)^{l-k}; term(l,k) is advanced
    // in l through term(l,k) = -term(l-1,k) (c_l / c_{l-1}) l / (l-k).
    struct Acc {
        detail::CompensatedSum sum;
        double term = 0.0;
        double prev_sum = 0.0;
        std::size_t settled = 0;
        bool done = false;
        double value = 0.0;
    };
    std::vector<Acc> acc(K);
    std::size_t open = K;
    double c_prev = 0.0;
    std::size_t l = 1;
    for (; l < series_term_cap && open > 0; ++l) {
        const double c = rule.centered(l);
        const double dl = static_cast<double>(l);
        const std::size_t k_end = std::min(K, l + 1);
        for (std::size_t k = 0; k < k_end; ++k) {
            Acc& a = acc[k];
            if (a.done)
                continue;
            double t;
            if (k == l || c_prev == 0.0) {
                const double lb = std::lgamma(dl + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                                  std::lgamma(dl - static_cast<double>(k) + 1.0);
                t = ((l - k) % 2 ? -1.0 : 1.0) * c * std::exp(lb);
            } else {
                t = -a.term * (c / c_prev) * dl / (dl - static_cast<double>(k));
            }
            if (!std::isfinite(t))
                throw SeriesDivergence("x-basis coefficient " + std::to_string(k) +
                                       " of the limit exponent does not converge");
            const double prev_t = a.term;
            a.prev_sum = a.sum.value();
            a.sum += t;
            a.term = t;
            if (l > k + 1) {
                const bool decreasing = std::fabs(t) < std::fabs(prev_t);
                const bool small = std::fabs(t) < tol;
                const bool alternating_small =
                    (t < 0.0) != (prev_t < 0.0) && std::fabs(std::fabs(t) - std::fabs(prev_t)) < tol;
                a.settled = (decreasing && (small || alternating_small)) ? a.settled + 1 : 0;
                if (a.settled >= settle_run) {
                    a.done = true;
                    a.value = small ? a.sum.value() : 0.5 * (a.sum.value() + a.prev_sum);
                }
            }
            if (a.done)
                --open;
        }
        c_prev = c;
    }
    if (open > 0) {
        std::size_t k = 0;
        while (acc[k].done)
            ++k;
        throw SeriesDivergence("x-basis coefficient " + std::to_string(k) + " of the limit exponent does not converge");
    }
    out.coeffs.resize(K);
    for (std::size_t k = 0; k < K; ++k)
        out.coeffs[k] = acc[k].value;
    out.terms_used = l - 1;
    return out;
}

Pmf general_limit_pmf(const LambdaRule& rule, std::size_t K, double tol)
{
    const auto basis = centered_rule_to_power_basis(rule, K, tol);
    return pmf_from_series(exp_power_series(basis.coeffs, K), "limit law exp{sum lambda_l (x-1)^l / l!}");
}

NegBinParams nb_from_scenario(double lambda, double nu)
{
    if (!(lambda > 0.0) || !(nu > 0.0))
        throw InvalidArgument("negative binomial limit needs lambda > 0 and nu > 0");
    return {2.0 * lambda / nu, nu / (2.0 + nu)};
}

Pmf nb_pmf(double r, double p, std::size_t K)
{
    if (!(r > 0.0) || !(p >= 0.0 && p < 1.0))
        throw InvalidArgument("negative binomial needs r > 0 and p in [0, 1)");
    if (K == 0)
        throw InvalidArgument("truncation length K must be positive");
    std::vector<double> q(K);
    q[0] = std::exp(r * std::log1p(-p));
    for (std::size_t k = 1; k < K; ++k)
        q[k] = q[k - 1] * p * (static_cast<double>(k - 1) + r) / static_cast<double>(k);
    return Pmf(std::move(q));
}

double nb_pgf(const NegBinParams& nb, double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    return std::exp(nb.r * (std::log1p(-nb.p) - std::log1p(-nb.p * x)));
}

ProductLawValue product_law_eval_detailed(const ScenarioSpec& spec, double x, double tol)
{
    require_convergent(spec);
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    if (!(tol > 0.0))
        throw InvalidArgument("tolerance must be positive");
    if (x == 1.0)
        return {1.0, 0, 0};
    ProductLawValue out;
    out.terms = product_terms(spec, 1.0 - x, tol);
    std::size_t N = out.terms;
    double v = truncated_product(spec, x, out.terms, N);
    for (;;) {
        if (N >= max_depth)
            throw NumericError("composition depth limit reached before the product settled");
        const double next = truncated_product(spec, x, out.terms, 2 * N);
        N *= 2;
        const bool settled = std::fabs(next - v) < tol / 10.0;
        v = next;
        if (settled)
            break;
    }
    out.value = v;
    out.horizon = N;
    return out;
}

double product_law_eval(const ScenarioSpec& spec, double x, double tol)
{
    return product_law_eval_detailed(spec, x, tol).value;
}

LimitMoments product_law_moments(const ScenarioSpec& spec, double tol)
{
    require_convergent(spec);
    if (!(tol > 0.0))
        throw InvalidArgument("tolerance must be positive");
    const std::size_t J = product_terms(spec, 1.0, tol);
    std::size_t N = J;
    LimitMoments m = truncated_moments(spec, J, N);
    for (;;) {
        if (N >= max_depth)
            throw NumericError("composition depth limit reached before the moments settled");
        const LimitMoments next = truncated_moments(spec, J, 2 * N);
        N *= 2;
        // differences halve with each doubling, so the remaining error is about one difference
        const bool settled = std::fabs(next.m1 - m.m1) < tol &&
                             std::fabs(next.m2 - m.m2) < tol * std::max(1.0, std::fabs(next.m2));
        m = next;
        if (settled)
            break;
    }
    return m;
}

double example1_closed_form(double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    const double u = 1.0 - x;
    constexpr double pi = std::numbers::pi;
    if (u < 1e-6)
        return 1.0 - pi * pi * u / 6.0 + std::pow(pi, 4) * u * u / 120.0;
    const double z = pi * std::sqrt(u);
    return std::sin(z) / z;
}

Pmf limit_pmf(const LimitLaw& law, std::size_t K)
{
    struct Visitor {
        std::size_t K;
        Pmf operator()(const PoissonLaw& p) const { return poisson_pmf(p.lambda, K); }
        Pmf operator()(const CompoundPoissonLaw& cp) const { return compound_poisson_pmf(cp.mu, K); }
        Pmf operator()(const NegativeBinomialLaw& nb) const { return nb_pmf(nb.params, K); }
        Pmf operator()(const GeneralExpLaw& g) const
        {
            try {
                return general_limit_pmf(g.rule, K);
            } catch (const SeriesDivergence&) {
                if (g.rule.kind != LambdaRule::Kind::log2)
                    throw;
                return compound_poisson_pmf(log2_intensity_measure(std::max<std::size_t>(K, 64)), K);
            }
        }
        Pmf operator()(const ProductLaw&) const
        {
            throw WrongRegime("the infinite-product law has no closed-form PMF; compare generating functions");
        }
        Pmf operator()(const Unclassified& u) const { throw WrongRegime("no limit law: " + u.reason); }
    };
    return std::visit(Visitor{K}, law);
}

std::size_t default_truncation(const LimitLaw& law)
{
    constexpr std::size_t fallback = 64;
    constexpr std::size_t cap = 4096;
    if (std::holds_alternative<ProductLaw>(law) || std::holds_alternative<Unclassified>(law))
        return fallback;
    const Pmf p = limit_pmf(law, cap / 2);
    double tail = 1.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        tail -= p[k];
        if (tail < 1e-10)
            return std::max<std::size_t>(2 * (k + 1), 16);
    }
    return cap;
}

double limit_pgf(const LimitLaw& law, const ScenarioSpec& spec, double x, double tol)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    struct Visitor {
        const ScenarioSpec& spec;
        double x;
        double tol;
        double operator()(const PoissonLaw& p) const { return std::exp(-p.lambda * (1.0 - x)); }
        double operator()(const CompoundPoissonLaw& cp) const { return compound_poisson_pgf(cp.mu, x); }
        double operator()(const NegativeBinomialLaw& nb) const { return nb_pgf(nb.params, x); }
        double operator()(const GeneralExpLaw& g) const { return std::exp(centered_exponent(g.rule, x, tol)); }
        double operator()(const ProductLaw&) const { return product_law_eval(spec, x, tol); }
        double operator()(const Unclassified& u) const { throw WrongRegime("no limit law: " + u.reason); }
    };
    return std::visit(Visitor{spec, x, tol}, law);
}

LimitMoments limit_moments(const LimitLaw& law, const ScenarioSpec& spec, double tol)
{
    struct Visitor {
        const ScenarioSpec& spec;
        double tol;
        LimitMoments operator()(const PoissonLaw& p) const { return {p.lambda, p.lambda * p.lambda}; }
        LimitMoments operator()(const CompoundPoissonLaw& cp) const
        {
            double m1 = 0.0;
            double f2 = 0.0;
            for (std::size_t j = 1; j <= cp.mu.atoms.size(); ++j) {
                const double dj = static_cast<double>(j);
                m1 += dj * cp.mu.atoms[j - 1];
                f2 += dj * (dj - 1.0) * cp.mu.atoms[j - 1];
            }
            return {m1, f2 + m1 * m1};
        }
        LimitMoments operator()(const NegativeBinomialLaw& nb) const
        {
            const double q = nb.params.p / (1.0 - nb.params.p);
            return {nb.params.r * q, nb.params.r * (nb.params.r + 1.0) * q * q};
        }
        LimitMoments operator()(const GeneralExpLaw& g) const
        {
            const double l1 = g.rule.value(1);
            return {l1, g.rule.value(2) + l1 * l1};
        }
        LimitMoments operator()(const ProductLaw&) const { return product_law_moments(spec, tol); }
        LimitMoments operator()(const Unclassified& u) const { throw WrongRegime("no limit law: " + u.reason); }
    };
    return std::visit(Visitor{spec, tol}, law);
}

} // namespace gwi
