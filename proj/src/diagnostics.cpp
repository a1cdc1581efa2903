#include "gwi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gwi/detail/format.hpp"
#include "gwi/engine.hpp"
#include "gwi/error.hpp"
#include "gwi/kernels.hpp"
#include "gwi/limits.hpp"

#include "json.hpp"

namespace gwi {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// (1 - G_j(1 - u)) / u without cancellation.
double chord_slope(const OffspringFamily& fam, std::size_t j, double u)
{
    switch (fam.kind) {
    case OffspringKind::bernoulli:
        return fam.mean(j);
    case OffspringKind::quadratic:
        return fam.mean(j) - fam.quadratic_coeffs(j)[2] * u;
    case OffspringKind::linear_fractional: {
        const auto lf = fam.linear_fractional(j);
        return lf.alpha / ((1.0 - lf.beta) * (1.0 - lf.beta + lf.beta * u));
    }
    case OffspringKind::custom: {
        // sum_i P(xi > i) (1 - u)^i
        const auto& row = fam.table[std::min(j, fam.table.size()) - 1];
        std::vector<double> tail(row.size(), 0.0);
        double t = 0.0;
        for (std::size_t i = row.size(); i-- > 0;) {
            tail[i] = t;
            t += row[i];
        }
        double v = 0.0;
        for (std::size_t i = row.size(); i-- > 0;)
            v = v * (1.0 - u) + tail[i];
        return v;
    }
    }
    return 0.0;
}

std::vector<double> default_x_grid()
{
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i)
        g.push_back(i / 10.0);
    return g;
}

} // namespace

double tv_distance(const Pmf& a, const Pmf& b)
{
    const auto x = a.coeffs();
    const auto y = b.coeffs();
    const std::size_t common = std::min(x.size(), y.size());
    double s = kernels::abs_diff_sum(x.first(common), y.first(common));
    const auto rest = x.size() > common ? x.subspan(common) : y.subspan(common);
    s += kernels::sum(rest);
    s += std::fabs(a.deficiency() - b.deficiency());
    return std::clamp(0.5 * s, 0.0, 1.0);
}

ToeplitzSums toeplitz_weights(const ScenarioSpec& spec, std::size_t n, std::size_t j_start)
{
    if (n == 0)
        throw InvalidArgument("Toeplitz sums need n >= 1");
    if (j_start == 0)
        throw InvalidArgument("Toeplitz sums start at j >= 1");
    const auto theta = vartheta_products(spec, n);
    long double prod = 1.0L;
    long double rho_sum = 0.0L;
    long double vartheta_sum = 0.0L;
    for (std::size_t j = n; j >= j_start; --j) {
        const long double d = spec.deficit(j);
        rho_sum += d * prod;
        vartheta_sum += d * static_cast<long double>(theta[j]);
        prod *= 1.0L - d;
    }
    return {static_cast<double>(rho_sum), static_cast<double>(vartheta_sum)};
}

double vartheta(const ScenarioSpec& spec, std::size_t j, std::size_t n)
{
    if (j == 0 || j > n)
        throw InvalidArgument("vartheta needs 1 <= j <= n");
    const RhoChain chain(spec.offspring, n);
    return chord_slope(spec.offspring, j, chain.prod(j));
}

std::vector<double> vartheta_products(const ScenarioSpec& spec, std::size_t n)
{
    const RhoChain chain(spec.offspring, n);
    std::vector<double> out(n + 1, 1.0);
    for (std::size_t j = n; j-- > 0;)
        out[j] = out[j + 1] * chord_slope(spec.offspring, j + 1, chain.prod(j + 1));
    return out;
}

std::vector<Sandwich> sandwich_bounds(const ScenarioSpec& spec, std::size_t n, double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    const RhoChain chain(spec.offspring, n);
    const auto theta = vartheta_products(spec, n);
    std::vector<Sandwich> out(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        out[j] = {1.0 + chain.prod(j) * (x - 1.0), 1.0 + theta[j] * (x - 1.0)};
    return out;
}

double accompanying_gap_bound(const ScenarioSpec& spec, std::size_t n, double x)
{
    if (spec.immigration.kind != ImmigrationKind::bernoulli)
        throw InvalidArgument("the accompanying gap bound needs Bernoulli immigration");
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
    const RhoChain chain(spec.offspring, n);
    double s = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double t = spec.immigration_mean(j) * chain.prod(j);
        s += t * t;
    }
    return (1.0 - x) * (1.0 - x) * s;
}

ConvergenceReport report(const ScenarioSpec& spec, std::span<const std::size_t> n_grid, const ReportOptions& opt)
{
    const LimitLaw law = regime_classify(spec);
    if (const auto* u = std::get_if<Unclassified>(&law))
        throw WrongRegime("no limit law: " + u->reason);
    const bool product = std::holds_alternative<ProductLaw>(law);

    ConvergenceReport rep;
    rep.law = describe(law);
    rep.metric = product ? "pgf_sup" : "tv";
    rep.truncation = opt.K;

    const auto x_grid = opt.x_grid.empty() ? default_x_grid() : opt.x_grid;
    std::vector<double> limit_values;
    Pmf limit;
    if (product) {
        for (double x : x_grid)
            limit_values.push_back(product_law_eval(spec, x, opt.tol));
    } else {
        limit = limit_pmf(law, opt.K);
    }
    const LimitMoments lm = limit_moments(law, spec, opt.tol);

    std::vector<std::size_t> grid(n_grid.begin(), n_grid.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const auto states = propagate_grid(spec, grid, opt.K);

    for (const auto& st : states) {
        ReportRow row;
        row.n = st.n;
        row.truncated = st.truncation_alarm;
        if (product) {
            double sup = 0.0;
            for (std::size_t i = 0; i < x_grid.size(); ++i)
                sup = std::max(sup, std::fabs(eval(st.pmf, x_grid[i]) - limit_values[i]));
            row.tv = sup;
        } else {
            row.tv = tv_distance(st.pmf, limit);
        }
        row.mean_gap = std::fabs(factorial_moment(st.pmf, 1) - lm.m1);
        row.m2_gap = std::fabs(factorial_moment(st.pmf, 2) - lm.m2);
        if (st.n == 0) {
            row.bound = spec.immigration.kind == ImmigrationKind::bernoulli ? 0.0 : nan;
            row.toeplitz = 0.0;
        } else {
            row.bound = spec.immigration.kind == ImmigrationKind::bernoulli ? accompanying_gap_bound(spec, st.n, 0.0)
                                                                            : nan;
            row.toeplitz = toeplitz_weights(spec, st.n).rho_sum;
            row.ratios = condition_ratios(spec, st.n);
        }
        if (opt.reps > 0)
            row.mc_tv = tv_distance(simulate(spec, st.n, opt.reps, opt.seed), st.pmf);
        rep.rows.push_back(row);
    }
    return rep;
}

std::string report_csv(const ConvergenceReport& r)
{
    using detail::fmt17;
    const bool mc = std::any_of(r.rows.begin(), r.rows.end(), [](const ReportRow& row) { return row.mc_tv >= 0.0; });
    std::string out = "n,tv,mean_gap,m2_gap,bound,toeplitz";
    out += mc ? ",mc_tv\n" : "\n";
    for (const auto& row : r.rows) {
        out += std::to_string(row.n) + ',' + fmt17(row.tv) + ',' + fmt17(row.mean_gap) + ',' + fmt17(row.m2_gap) +
               ',' + fmt17(row.bound) + ',' + fmt17(row.toeplitz);
        if (mc)
            out += ',' + fmt17(row.mc_tv);
        out += '\n';
    }
    return out;
}

std::string report_json(const ConvergenceReport& r)
{
    nlohmann::ordered_json j;
    j["law"] = r.law;
    j["metric"] = r.metric;
    j["truncation"] = r.truncation;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json o;
        o["n"] = row.n;
        o["tv"] = row.tv;
        o["mean_gap"] = row.mean_gap;
        o["m2_gap"] = row.m2_gap;
        o["accompanying_gap_bound"] = std::isnan(row.bound) ? nlohmann::ordered_json() : nlohmann::ordered_json(row.bound);
        o["toeplitz_sum"] = row.toeplitz;
        o["condition_ratios"] = {{"m1_ratio", row.ratios.m1_ratio},
                                 {"m2_ratio", row.ratios.m2_ratio},
                                 {"g2_ratio", row.ratios.g2_ratio},
                                 {"g3_ratio", row.ratios.g3_ratio},
                                 {"deficit_sum", row.ratios.deficit_sum}};
        o["truncated"] = row.truncated;
        if (row.mc_tv >= 0.0)
            o["mc_tv"] = row.mc_tv;
        rows.push_back(std::move(o));
    }
    return j.dump(2) + '\n';
}

} // namespace gwi
