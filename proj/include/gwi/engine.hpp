#pragma once

// Distribution propagation for X_n = sum_{i <= X_{n-1}} xi_{n,i} + eps_n,
// scalar evaluation of the composed maps, and Monte Carlo simulation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gwi/models.hpp"
#include "gwi/pgf.hpp"

namespace gwi {

// Propagation flags truncation when more than this much mass is lost.
inline constexpr double truncation_alarm = 1e-6;

struct GenerationState {
    std::size_t n = 0;
    Pmf pmf;
    double cumulative_deficiency = 0.0;
    bool truncation_alarm = false;
};

// compound(prev, offspring) convolved with the immigration law.
Pmf step(const Pmf& prev, const Pmf& offspring_pmf, const Pmf& immigration_pmf, std::size_t K);

// Law of X_n starting from X_0 ~ initial (default: X_0 = 0).
GenerationState propagate(const ScenarioSpec& spec, std::size_t n, std::size_t K, const Pmf& initial = Pmf());

// Laws of X_n at every n of an ascending grid, from a single sweep.
std::vector<GenerationState> propagate_grid(const ScenarioSpec& spec, std::span<const std::size_t> n_grid,
                                            std::size_t K, const Pmf& initial = Pmf());

// Gbar_{j+1,n}(x) = G_{j+1}(G_{j+2}(... G_n(x) ...)), iterated inside out.
double gbar_eval(const ScenarioSpec& spec, std::size_t j, std::size_t n, double x);

// Gbar_{j+1,n}(x) for j = 0..n in one backward sweep.
std::vector<double> gbar_eval_all(const ScenarioSpec& spec, std::size_t n, double x);

// prod_j H_j(Gbar_{j+1,n}(x)): the generating function of X_n evaluated
// without coefficient arithmetic.
double fn_product_eval(const ScenarioSpec& spec, std::size_t n, double x);

// exp{sum_j (H_j(Gbar_{j+1,n}(x)) - 1)}
double accompanying_eval(const ScenarioSpec& spec, std::size_t n, double x);

// sum_k |z_k - w_k|, which bounds |prod z - prod w| for factors in [-1, 1].
// Throws InvalidArgument for mismatched lengths or factors outside [-1, 1].
double product_difference_bound(std::span<const double> z, std::span<const double> w);

// Seed of trajectory block i: a SplitMix64 hash of (seed, i).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Trajectories per RNG stream.
inline constexpr std::size_t simulation_block = 1024;

struct SimulationResult {
    Pmf empirical;
    std::vector<std::uint64_t> counts;
    std::size_t reps = 0;
};

// Empirical law of X_n from reps independent trajectories, sampling each
// individual's offspring directly. Deterministic in (spec, n, reps, seed) for
// any worker count.
SimulationResult simulate_detailed(const ScenarioSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed,
                                   unsigned workers = 0);
Pmf simulate(const ScenarioSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed);

} // namespace gwi
