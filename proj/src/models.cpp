#include "gwi/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gwi/error.hpp"
#include "gwi/limits.hpp"

namespace gwi {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// x^{-g} with an integer fast path; the convergent-regime sweeps evaluate
// this tens of millions of times.
double inverse_power(double x, double g)
{
    if (g == std::floor(g) && g >= 0.0 && g <= 8.0) {
        double p = 1.0;
        for (int i = 0; i < static_cast<int>(g); ++i)
            p *= x;
        return 1.0 / p;
    }
    return std::pow(x, -g);
}

double mean_of(std::span<const double> row)
{
    double m = 0.0;
    for (std::size_t k = 1; k < row.size(); ++k)
        m += static_cast<double>(k) * row[k];
    return m;
}

const std::vector<double>& custom_row(const OffspringFamily& fam, std::size_t n)
{
    if (fam.table.empty())
        throw ValidationError("custom offspring family has an empty table");
    const std::size_t idx = std::min(n, fam.table.size()) - 1;
    return fam.table[idx];
}

bool nearly_critical(const OffspringFamily& fam)
{
    return fam.kind != OffspringKind::custom && fam.rho.c > 0.0 && fam.rho.gamma > 0.0;
}

double falling_moment(std::span<const double> row, std::size_t k)
{
    double s = 0.0;
    for (std::size_t j = k; j < row.size(); ++j) {
        double f = 1.0;
        for (std::size_t i = 0; i < k; ++i)
            f *= static_cast<double>(j - i);
        s += f * row[j];
    }
    return s;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

double RhoRule::deficit(std::size_t n) const
{
    return c * inverse_power(static_cast<double>(n) + n0, gamma);
}

double SequenceRule::at(std::size_t n, double rho_deficit) const
{
    switch (kind) {
    case Kind::constant:
        return a;
    case Kind::proportional:
        return a * rho_deficit;
    case Kind::power_sum: {
        double v = 0.0;
        const double dn = static_cast<double>(n);
        for (const auto& t : terms)
            v += t.coef * inverse_power(dn, -t.exponent);
        return v;
    }
    }
    return 0.0;
}

double OffspringFamily::deficit(std::size_t n) const
{
    if (n == 0)
        throw InvalidArgument("generations are indexed from n = 1");
    if (kind == OffspringKind::custom)
        return 1.0 - mean_of(custom_row(*this, n));
    return rho.deficit(n);
}

bool OffspringFamily::divergent() const
{
    if (kind == OffspringKind::custom)
        return mean_of(table.back()) < 1.0;
    return rho.divergent();
}

std::vector<double> OffspringFamily::quadratic_coeffs(std::size_t n) const
{
    const double d = deficit(n);
    const double r = 1.0 - d;
    const double p2 = nu * d / 2.0;
    const double p1 = r - nu * d;
    const double p0 = d + p2; // 1 - p1 - p2
    if (p1 < -1e-15 || r < 0.0)
        throw ValidationError("quadratic offspring inadmissible at n = " + std::to_string(n) + ": nu = " + fmt(nu) +
                              " exceeds rho_n / (1 - rho_n) = " + fmt(r / d) + "; raise offspring.rho.n0");
    return {p0, std::max(p1, 0.0), p2};
}

LinearFractional OffspringFamily::linear_fractional(std::size_t n) const
{
    const double d = deficit(n);
    if (kind == OffspringKind::bernoulli)
        return {1.0 - d, 0.0};
    if (kind != OffspringKind::linear_fractional)
        throw UnsupportedFamily("offspring family has no linear fractional form");
    if (!(1.0 - d > 0.0))
        throw ValidationError("linear fractional offspring needs rho_n > 0 at n = " + std::to_string(n));
    return lf_from_derivatives(1.0 - d, nu * d);
}

Pmf OffspringFamily::pmf(std::size_t n, std::size_t K) const
{
    if (K == 0)
        throw InvalidArgument("truncation length K must be positive");
    std::vector<double> c;
    switch (kind) {
    case OffspringKind::bernoulli: {
        const double d = deficit(n);
        c = {d, 1.0 - d};
        break;
    }
    case OffspringKind::quadratic:
        c = quadratic_coeffs(n);
        break;
    case OffspringKind::linear_fractional: {
        const auto lf = linear_fractional(n);
        c.resize(K);
        c[0] = lf.prob(0);
        double pk = lf.alpha;
        for (std::size_t k = 1; k < K; ++k) {
            c[k] = pk;
            pk *= lf.beta;
            if (pk == 0.0) {
                c.resize(k + 1);
                break;
            }
        }
        break;
    }
    case OffspringKind::custom:
        c = custom_row(*this, n);
        break;
    }
    if (c.size() > K)
        c.resize(K);
    return Pmf(std::move(c));
}

double ScenarioSpec::immigration_moment(std::size_t n, std::size_t k) const
{
    if (k == 0)
        return 1.0;
    const double rate = immigration.rate.at(n, deficit(n));
    switch (immigration.kind) {
    case ImmigrationKind::bernoulli:
        return k == 1 ? rate : 0.0;
    case ImmigrationKind::poisson:
        return std::pow(rate, static_cast<double>(k));
    case ImmigrationKind::custom:
        return rate * falling_moment(immigration.base, k);
    }
    return 0.0;
}

double ScenarioSpec::immigration_pgf(std::size_t n, double x) const
{
    const double rate = immigration.rate.at(n, deficit(n));
    switch (immigration.kind) {
    case ImmigrationKind::bernoulli:
        return 1.0 - rate * (1.0 - x);
    case ImmigrationKind::poisson:
        return std::exp(-rate * (1.0 - x));
    case ImmigrationKind::custom: {
        double h = 0.0;
        const auto& b = immigration.base;
        for (std::size_t k = b.size(); k-- > 0;)
            h = h * x + b[k];
        return 1.0 - rate * (1.0 - h);
    }
    }
    return 1.0;
}

Pmf ScenarioSpec::immigration_pmf(std::size_t n, std::size_t K) const
{
    if (K == 0)
        throw InvalidArgument("truncation length K must be positive");
    const double rate = immigration.rate.at(n, deficit(n));
    switch (immigration.kind) {
    case ImmigrationKind::bernoulli:
        if (!(rate >= 0.0 && rate <= 1.0))
            throw ValidationError("Bernoulli immigration mean m_{" + std::to_string(n) + ",1} = " + fmt(rate) +
                                  " is not a probability");
        return K == 1 ? Pmf({1.0 - rate}) : Pmf::bernoulli(rate);
    case ImmigrationKind::poisson:
        return poisson_pmf(rate, K);
    case ImmigrationKind::custom: {
        if (!(rate >= 0.0 && rate <= 1.0))
            throw ValidationError("custom immigration weight w_" + std::to_string(n) + " = " + fmt(rate) +
                                  " is not a probability");
        const auto& b = immigration.base;
        std::vector<double> c(std::min(K, b.size()), 0.0);
        for (std::size_t k = 0; k < c.size(); ++k)
            c[k] = rate * b[k];
        c[0] += 1.0 - rate;
        return Pmf(std::move(c));
    }
    }
    return Pmf();
}

double offspring_pgf_at(const OffspringFamily& fam, std::size_t n, double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("PGF argument outside [0, 1]");
    switch (fam.kind) {
    case OffspringKind::bernoulli:
        return 1.0 - fam.mean(n) * (1.0 - x);
    case OffspringKind::quadratic: {
        const double d = fam.deficit(n);
        if (1.0 - d - fam.nu * d < -1e-15)
            fam.quadratic_coeffs(n); // throws
        const double u = 1.0 - x;
        // 1 + rho (x-1) + p2 (x-1)^2
        return 1.0 - u * (1.0 - d - 0.5 * fam.nu * d * u);
    }
    case OffspringKind::linear_fractional:
        return fam.linear_fractional(n)(x);
    case OffspringKind::custom: {
        const auto& row = custom_row(fam, n);
        double acc = 0.0;
        for (std::size_t k = row.size(); k-- > 0;)
            acc = acc * x + row[k];
        return acc;
    }
    }
    return 1.0;
}

double offspring_deriv_at_1(const OffspringFamily& fam, std::size_t n, std::size_t s)
{
    if (s == 0)
        throw InvalidArgument("derivative order must be at least 1");
    switch (fam.kind) {
    case OffspringKind::bernoulli:
        return s == 1 ? fam.mean(n) : 0.0;
    case OffspringKind::quadratic:
        fam.quadratic_coeffs(n);
        if (s == 1)
            return fam.mean(n);
        return s == 2 ? fam.nu * fam.deficit(n) : 0.0;
    case OffspringKind::linear_fractional:
        if (s == 1)
            return fam.mean(n);
        return fam.linear_fractional(n).deriv_at_1(s);
    case OffspringKind::custom:
        return falling_moment(custom_row(fam, n), s);
    }
    return 0.0;
}

double asymptotic_ratio(const SequenceRule& rule, const OffspringFamily& fam)
{
    if (fam.kind == OffspringKind::custom) {
        const double d = 1.0 - mean_of(fam.table.back());
        switch (rule.kind) {
        case SequenceRule::Kind::constant:
        case SequenceRule::Kind::proportional:
            return rule.kind == SequenceRule::Kind::constant ? rule.a / d : rule.a;
        case SequenceRule::Kind::power_sum: {
            double lead = -inf;
            double coef = 0.0;
            for (const auto& t : rule.terms)
                if (t.coef != 0.0 && t.exponent > lead)
                    lead = t.exponent, coef = t.coef;
            if (lead < 0.0)
                return 0.0;
            return lead == 0.0 ? coef / d : inf;
        }
        }
    }
    const double g = fam.rho.gamma;
    switch (rule.kind) {
    case SequenceRule::Kind::constant:
        if (rule.a == 0.0)
            return 0.0;
        return g > 0.0 ? inf : rule.a / fam.rho.c;
    case SequenceRule::Kind::proportional:
        return rule.a;
    case SequenceRule::Kind::power_sum: {
        double lead = -inf;
        for (const auto& t : rule.terms)
            if (t.coef != 0.0)
                lead = std::max(lead, t.exponent);
        if (lead == -inf)
            return 0.0;
        const double order = lead + g;
        if (order < 0.0)
            return 0.0;
        if (order > 0.0)
            return inf;
        double coef = 0.0;
        for (const auto& t : rule.terms)
            if (t.exponent == lead)
                coef += t.coef;
        return coef / fam.rho.c;
    }
    }
    return inf;
}

bool summable(const SequenceRule& rule, const OffspringFamily& fam)
{
    switch (rule.kind) {
    case SequenceRule::Kind::constant:
        return rule.a == 0.0;
    case SequenceRule::Kind::proportional:
        return rule.a == 0.0 || (fam.kind != OffspringKind::custom && !fam.rho.divergent());
    case SequenceRule::Kind::power_sum:
        return std::all_of(rule.terms.begin(), rule.terms.end(),
                           [](const SequenceRule::Term& t) { return t.coef == 0.0 || t.exponent < -1.0; });
    }
    return false;
}

namespace {

// lim m_{n,2} / (1 - rho_n) from the closed forms.
double m2_ratio_limit(const ScenarioSpec& spec)
{
    const double r = asymptotic_ratio(spec.immigration.rate, spec.offspring);
    switch (spec.immigration.kind) {
    case ImmigrationKind::bernoulli:
        return 0.0;
    case ImmigrationKind::poisson:
        // m_{n,2} = m_{n,1}^2 and 1 - rho_n -> 0
        return std::isfinite(r) && nearly_critical(spec.offspring) ? 0.0 : inf;
    case ImmigrationKind::custom: {
        const double M2 = falling_moment(spec.immigration.base, 2);
        return M2 == 0.0 ? 0.0 : r * M2;
    }
    }
    return inf;
}

void check_cascade(const LambdaRule& rule, std::vector<std::string>& errors)
{
    if (rule.kind != LambdaRule::Kind::list)
        return;
    bool seen_zero = false;
    for (std::size_t l = 1; l <= rule.values.size(); ++l) {
        const double v = rule.values[l - 1];
        if (v < 0.0)
            errors.push_back("lambda_" + std::to_string(l) + " is negative");
        if (seen_zero && v != 0.0) {
            errors.push_back("lambda_" + std::to_string(l) +
                             " is nonzero after a vanishing lambda; admissible sequences stay zero");
            return;
        }
        if (l >= 2 && v == 0.0)
            seen_zero = true;
    }
}

bool close_enough(double declared, double actual)
{
    if (declared == 0.0)
        return std::fabs(actual) <= 0.1;
    return std::fabs(actual - declared) <= 0.1 * std::fabs(declared);
}

} // namespace

std::vector<std::string> validate(const ScenarioSpec& spec)
{
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    const auto& off = spec.offspring;
    const std::size_t N = spec.run.horizon;

    if (off.kind == OffspringKind::custom) {
        if (off.table.empty())
            errors.push_back("custom offspring family needs offspring.table");
        for (std::size_t i = 0; i < off.table.size(); ++i) {
            const auto& row = off.table[i];
            double s = 0.0;
            bool ok = !row.empty();
            for (double v : row) {
                ok = ok && v >= 0.0 && std::isfinite(v);
                s += v;
            }
            if (!ok || std::fabs(s - 1.0) > 1e-9)
                errors.push_back("offspring.table row " + std::to_string(i + 1) + " is not a PMF");
            else if (mean_of(row) >= 1.0)
                errors.push_back("offspring.table row " + std::to_string(i + 1) + " has mean >= 1");
        }
    } else {
        if (!(off.rho.c > 0.0))
            errors.push_back("offspring.rho.c must be positive");
        if (!(off.rho.gamma >= 0.0))
            errors.push_back("offspring.rho.gamma must be nonnegative");
        if (!(off.rho.n0 >= 0.0))
            errors.push_back("offspring.rho.n0 must be nonnegative");
        if (!(off.nu >= 0.0))
            errors.push_back("offspring.nu must be nonnegative");
        if (off.kind == OffspringKind::bernoulli && off.nu != 0.0)
            errors.push_back("bernoulli offspring has G''(1) = 0; offspring.nu must be 0");
    }

    if (errors.empty()) {
        if (spec.declared.divergent != off.divergent()) {
            if (off.kind == OffspringKind::custom)
                errors.push_back("limits.divergent contradicts the custom table's constant mean");
            else
                errors.push_back("limits.divergent = " + std::string(spec.declared.divergent ? "true" : "false") +
                                 " contradicts offspring.rho.gamma = " + fmt(off.rho.gamma) +
                                 " (sum of 1 - rho_n diverges iff gamma <= 1)");
        }
        for (std::size_t n = 1; n <= N && errors.empty(); ++n) {
            const double d = off.deficit(n);
            if (!(d > 0.0 && d <= 1.0)) {
                errors.push_back("rho_" + std::to_string(n) + " = " + fmt(1.0 - d) + " outside [0, 1)");
                break;
            }
            try {
                if (off.kind == OffspringKind::quadratic)
                    off.quadratic_coeffs(n);
                if (off.kind == OffspringKind::linear_fractional)
                    off.linear_fractional(n);
            } catch (const Error& e) {
                errors.push_back(e.what());
            }
        }
    }

    const auto& imm = spec.immigration;
    if (imm.kind == ImmigrationKind::custom) {
        double s = 0.0;
        bool ok = !imm.base.empty();
        for (double v : imm.base) {
            ok = ok && v >= 0.0 && std::isfinite(v);
            s += v;
        }
        if (!ok || s > 1.0 + 1e-9 || s < 1.0 - 1e-6)
            errors.push_back("immigration.base is not a PMF");
    }
    if (imm.rate.kind == SequenceRule::Kind::power_sum && imm.rate.terms.empty())
        errors.push_back("power_sum rule needs at least one term");
    if (errors.empty()) {
        bool warned = false;
        for (std::size_t n = 1; n <= N; ++n) {
            const double r = imm.rate.at(n, off.deficit(n));
            if (!(r >= 0.0) || !std::isfinite(r)) {
                errors.push_back("immigration rate at n = " + std::to_string(n) + " is negative or not finite");
                break;
            }
            if (!warned && r > 1.0 && imm.kind != ImmigrationKind::poisson) {
                warnings.push_back("immigration rate " + fmt(r) + " > 1 at n = " + std::to_string(n) +
                                   "; H_n is only a formal generating function there and propagation will reject it");
                warned = true;
            }
        }
    }

    if (!(spec.declared.nu >= 0.0))
        errors.push_back("limits.nu must be nonnegative");
    if (!(spec.declared.lambda >= 0.0))
        errors.push_back("limits.lambda must be nonnegative");
    check_cascade(spec.declared.lambda_l, errors);

    if (!errors.empty()) {
        std::string msg = "scenario '" + spec.name + "' is invalid:";
        for (const auto& e : errors)
            msg += "\n  - " + e;
        throw ValidationError(msg);
    }

    if (spec.declared.divergent && nearly_critical(off) && N >= 1) {
        const auto cr = condition_ratios(spec, N);
        if (!close_enough(spec.declared.lambda, cr.m1_ratio))
            warnings.push_back("declared lambda = " + fmt(spec.declared.lambda) + " but m_{N,1}/(1-rho_N) = " +
                               fmt(cr.m1_ratio) + " at N = " + std::to_string(N));
        if (!close_enough(spec.declared.nu, cr.g2_ratio))
            warnings.push_back("declared nu = " + fmt(spec.declared.nu) + " but G_N''(1)/(1-rho_N) = " +
                               fmt(cr.g2_ratio) + " at N = " + std::to_string(N));
        const auto& rule = spec.declared.lambda_l;
        if (rule.kind == LambdaRule::Kind::list) {
            for (std::size_t l = 1; l <= rule.values.size(); ++l) {
                const double actual = spec.immigration_moment(N, l) / (static_cast<double>(l) * spec.deficit(N));
                if (!close_enough(rule.values[l - 1], actual))
                    warnings.push_back("declared lambda_" + std::to_string(l) + " = " + fmt(rule.values[l - 1]) +
                                       " but m_{N," + std::to_string(l) + "}/(" + std::to_string(l) +
                                       "(1-rho_N)) = " + fmt(actual));
            }
        }
    }
    return warnings;
}

LimitLaw regime_classify(const ScenarioSpec& spec)
{
    const auto& off = spec.offspring;
    const auto& d = spec.declared;
    if (!nearly_critical(off))
        return Unclassified{"offspring means do not tend to 1"};

    if (!d.divergent) {
        if (summable(spec.immigration.rate, off))
            return ProductLaw{};
        return Unclassified{"convergent regime requires sum of m_{n,1} < infinity"};
    }

    if (d.nu == 0.0) {
        if (d.lambda_l.declared()) {
            if (d.lambda_l.finite()) {
                std::vector<double> lam = d.lambda_l.values;
                if (lam.empty() || lam.back() != 0.0)
                    lam.push_back(0.0);
                if (lam.size() == 2)
                    return PoissonLaw{lam[0]};
                try {
                    return CompoundPoissonLaw{cp_intensity_finite(lam)};
                } catch (const Error& e) {
                    return Unclassified{e.what()};
                }
            }
            try {
                return CompoundPoissonLaw{cp_intensity_series(d.lambda_l, 1e-13)};
            } catch (const SeriesDivergence&) {
                return GeneralExpLaw{d.lambda_l};
            }
        }
        if (m2_ratio_limit(spec) != 0.0)
            return Unclassified{"m_{n,2}/(1-rho_n) does not vanish; declare limits.lambda_l"};
        return PoissonLaw{d.lambda};
    }

    if (m2_ratio_limit(spec) != 0.0)
        return Unclassified{"nu > 0 needs immigration close to Bernoulli (m_{n,2}/(1-rho_n) -> 0)"};
    if (!(d.lambda > 0.0))
        return PoissonLaw{0.0};
    return NegativeBinomialLaw{nb_from_scenario(d.lambda, d.nu)};
}

ConditionRatios condition_ratios(const ScenarioSpec& spec, std::size_t n)
{
    if (n == 0)
        throw InvalidArgument("condition ratios need n >= 1");
    ConditionRatios r;
    const double d = spec.deficit(n);
    r.m1_ratio = spec.immigration_moment(n, 1) / d;
    r.m2_ratio = spec.immigration_moment(n, 2) / d;
    r.g2_ratio = offspring_deriv_at_1(spec.offspring, n, 2) / d;
    r.g3_ratio = offspring_deriv_at_1(spec.offspring, n, 3) / d;
    double s = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
        s += spec.deficit(j);
    r.deficit_sum = s;
    return r;
}

RhoChain::RhoChain(const OffspringFamily& fam, std::size_t n)
    : n_(n), deficit_(n + 1, 0.0), log_suffix_(n + 1, 0.0)
{
    for (std::size_t l = 1; l <= n; ++l)
        deficit_[l] = fam.deficit(l);
    for (std::size_t j = n; j-- > 0;)
        log_suffix_[j] = log_suffix_[j + 1] + std::log1p(-deficit_[j + 1]);
}

double RhoChain::prod(std::size_t j) const { return std::exp(log_suffix_.at(j)); }

} // namespace gwi
