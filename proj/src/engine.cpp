#include "gwi/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "gwi/error.hpp"

namespace gwi {

namespace {

void require_unit_interval(double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("x outside [0, 1]");
}

// Per-generation samplers, built once per simulation.
struct Categorical {
    std::vector<double> cdf;

    Categorical() = default;
    explicit Categorical(std::span<const double> pmf)
    {
        double acc = 0.0;
        for (double p : pmf)
            cdf.push_back(acc += p);
    }
    std::uint64_t sample(double u) const
    {
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        // mass lost to roundoff lands on the last support point
        return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
    }
};

struct OffspringSampler {
    OffspringKind kind = OffspringKind::bernoulli;
    double rho = 0.0;
    double zero_prob = 0.0; // linear fractional: P(0)
    double log_beta = 0.0;  // linear fractional: log beta (or 0 when beta = 0)
    Categorical table;
};

struct ImmigrationSampler {
    ImmigrationKind kind = ImmigrationKind::bernoulli;
    double rate = 0.0;
    double exp_neg_rate = 1.0;
    Categorical base;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t draw_offspring(const OffspringSampler& s, Rng& rng)
{
    switch (s.kind) {
    case OffspringKind::bernoulli:
        return rng.uniform() < s.rho ? 1 : 0;
    case OffspringKind::linear_fractional: {
        if (rng.uniform() < s.zero_prob)
            return 0;
        if (s.log_beta == 0.0)
            return 1;
        // 1 + Geometric(beta) failures
        const double u = 1.0 - rng.uniform();
        return 1 + static_cast<std::uint64_t>(std::floor(std::log(u) / s.log_beta));
    }
    case OffspringKind::quadratic:
    case OffspringKind::custom:
        return s.table.sample(rng.uniform());
    }
    return 0;
}

std::uint64_t draw_immigration(const ImmigrationSampler& s, Rng& rng)
{
    switch (s.kind) {
    case ImmigrationKind::bernoulli:
        return rng.uniform() < s.rate ? 1 : 0;
    case ImmigrationKind::poisson: {
        // inversion; means here are small
        double u = rng.uniform();
        std::uint64_t k = 0;
        double p = s.exp_neg_rate;
        double cdf = p;
        while (u >= cdf && p > 0.0) {
            ++k;
            p *= s.rate / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    case ImmigrationKind::custom:
        if (rng.uniform() >= s.rate)
            return 0;
        return s.base.sample(rng.uniform());
    }
    return 0;
}

OffspringSampler make_offspring_sampler(const ScenarioSpec& spec, std::size_t n)
{
    OffspringSampler s;
    s.kind = spec.offspring.kind;
    s.rho = spec.rho(n);
    switch (spec.offspring.kind) {
    case OffspringKind::bernoulli:
        break;
    case OffspringKind::linear_fractional: {
        const auto lf = spec.offspring.linear_fractional(n);
        s.zero_prob = lf.prob(0);
        s.log_beta = lf.beta > 0.0 ? std::log(lf.beta) : 0.0;
        break;
    }
    case OffspringKind::quadratic:
        s.table = Categorical(spec.offspring.quadratic_coeffs(n));
        break;
    case OffspringKind::custom: {
        const auto& t = spec.offspring.table;
        s.table = Categorical(t[std::min(n, t.size()) - 1]);
        break;
    }
    }
    return s;
}

ImmigrationSampler make_immigration_sampler(const ScenarioSpec& spec, std::size_t n)
{
    ImmigrationSampler s;
    s.kind = spec.immigration.kind;
    s.rate = spec.immigration.rate.at(n, spec.deficit(n));
    switch (spec.immigration.kind) {
    case ImmigrationKind::bernoulli:
    case ImmigrationKind::custom:
        if (!(s.rate >= 0.0 && s.rate <= 1.0))
            throw ValidationError("immigration at n = " + std::to_string(n) + " is not a distribution");
        if (spec.immigration.kind == ImmigrationKind::custom)
            s.base = Categorical(spec.immigration.base);
        break;
    case ImmigrationKind::poisson:
        if (!(s.rate >= 0.0 && s.rate < 700.0))
            throw InvalidArgument("Poisson immigration mean outside the sampler's range");
        s.exp_neg_rate = std::exp(-s.rate);
        break;
    }
    return s;
}

} // namespace

Pmf step(const Pmf& prev, const Pmf& offspring_pmf, const Pmf& immigration_pmf, std::size_t K)
{
    return convolve(compound(prev, offspring_pmf, K), immigration_pmf, K);
}

std::vector<GenerationState> propagate_grid(const ScenarioSpec& spec, std::span<const std::size_t> n_grid,
                                            std::size_t K, const Pmf& initial)
{
    if (K == 0)
        throw InvalidArgument("truncation length K must be positive");
    if (!std::is_sorted(n_grid.begin(), n_grid.end()))
        throw InvalidArgument("n grid must be ascending");
    std::vector<GenerationState> out;
    out.reserve(n_grid.size());
    GenerationState state{0, initial, initial.deficiency(), false};
    std::size_t next = 0;
    auto record = [&] {
        while (next < n_grid.size() && n_grid[next] == state.n) {
            out.push_back(state);
            ++next;
        }
    };
    record();
    while (next < n_grid.size()) {
        const std::size_t n = state.n + 1;
        state.pmf = step(state.pmf, spec.offspring.pmf(n, K), spec.immigration_pmf(n, K), K);
        state.n = n;
        state.cumulative_deficiency = std::max(state.cumulative_deficiency, state.pmf.deficiency());
        state.truncation_alarm = state.cumulative_deficiency > truncation_alarm;
        record();
    }
    return out;
}

GenerationState propagate(const ScenarioSpec& spec, std::size_t n, std::size_t K, const Pmf& initial)
{
    const std::size_t grid[] = {n};
    return propagate_grid(spec, grid, K, initial).front();
}

std::vector<double> gbar_eval_all(const ScenarioSpec& spec, std::size_t n, double x)
{
    require_unit_interval(x);
    std::vector<double> out(n + 1);
    double y = x;
    out[n] = y;
    for (std::size_t j = n; j-- > 0;) {
        y = offspring_pgf_at(spec.offspring, j + 1, y);
        out[j] = y;
    }
    return out;
}

double gbar_eval(const ScenarioSpec& spec, std::size_t j, std::size_t n, double x)
{
    require_unit_interval(x);
    if (j > n)
        throw InvalidArgument("gbar_eval needs j <= n");
    double y = x;
    for (std::size_t l = n; l > j; --l)
        y = offspring_pgf_at(spec.offspring, l, y);
    return y;
}

double fn_product_eval(const ScenarioSpec& spec, std::size_t n, double x)
{
    const auto g = gbar_eval_all(spec, n, x);
    double f = 1.0;
    for (std::size_t j = 1; j <= n; ++j)
        f *= spec.immigration_pgf(j, g[j]);
    return f;
}

double accompanying_eval(const ScenarioSpec& spec, std::size_t n, double x)
{
    const auto g = gbar_eval_all(spec, n, x);
    double s = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
        s += spec.immigration_pgf(j, g[j]) - 1.0;
    return std::exp(s);
}

double product_difference_bound(std::span<const double> z, std::span<const double> w)
{
    if (z.size() != w.size())
        throw InvalidArgument("factor sequences differ in length");
    double s = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (std::fabs(z[k]) > 1.0 || std::fabs(w[k]) > 1.0)
            throw InvalidArgument("product inequality needs factors in [-1, 1]");
        s += std::fabs(z[k] - w[k]);
    }
    return s;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL));
}

SimulationResult simulate_detailed(const ScenarioSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed,
                                   unsigned workers)
{
    if (reps == 0)
        throw InvalidArgument("simulation needs reps >= 1");
    std::vector<OffspringSampler> offspring;
    std::vector<ImmigrationSampler> immigration;
    offspring.reserve(n);
    immigration.reserve(n);
    for (std::size_t g = 1; g <= n; ++g) {
        offspring.push_back(make_offspring_sampler(spec, g));
        immigration.push_back(make_immigration_sampler(spec, g));
    }

    const std::size_t blocks = (reps + simulation_block - 1) / simulation_block;
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, blocks));

    std::vector<std::vector<std::uint64_t>> partial(workers);
    auto run = [&](unsigned w) {
        auto& counts = partial[w];
        for (std::size_t b = w; b < blocks; b += workers) {
            Rng rng(stream_seed(seed, b));
            const std::size_t end = std::min(reps, (b + 1) * simulation_block);
            for (std::size_t r = b * simulation_block; r < end; ++r) {
                std::uint64_t x = 0;
                for (std::size_t g = 0; g < n; ++g) {
                    std::uint64_t next = draw_immigration(immigration[g], rng);
                    for (std::uint64_t i = 0; i < x; ++i)
                        next += draw_offspring(offspring[g], rng);
                    x = next;
                }
                if (x >= counts.size())
                    counts.resize(x + 1, 0);
                ++counts[x];
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(run, w);
        for (auto& t : pool)
            t.join();
    }

    SimulationResult res;
    res.reps = reps;
    for (const auto& c : partial) {
        if (c.size() > res.counts.size())
            res.counts.resize(c.size(), 0);
        for (std::size_t k = 0; k < c.size(); ++k)
            res.counts[k] += c[k];
    }
    std::vector<double> p(res.counts.size());
    for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = static_cast<double>(res.counts[k]) / static_cast<double>(reps);
    res.empirical = Pmf(std::move(p));
    return res;
}

Pmf simulate(const ScenarioSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed)
{
    return simulate_detailed(spec, n, reps, seed).empirical;
}

} // namespace gwi
