#pragma once

// Distances between finite-n laws and their limits, the explicit bounds and
// weight sums of the convergence analysis, and the convergence report.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gwi/laws.hpp"
#include "gwi/models.hpp"
#include "gwi/pgf.hpp"

namespace gwi {

// (1/2)(sum_k |a_k - b_k| + |def(a) - def(b)|): missing mass is an extra
// absorbing point.
double tv_distance(const Pmf& a, const Pmf& b);

struct ToeplitzSums {
    double rho_sum = 0.0;      // sum_j (1 - rho_j) rho_{[j,n]}
    double vartheta_sum = 0.0; // sum_j (1 - rho_j) vartheta_{[j,n]}
};

// Weight sums over j_start <= j <= n.
ToeplitzSums toeplitz_weights(const ScenarioSpec& spec, std::size_t n, std::size_t j_start = 1);

// vartheta_{j,n} = (1 - G_j(1 - rho_{[j,n]})) / rho_{[j,n]}, the chord slope of
// G_j over [1 - rho_{[j,n]}, 1].
double vartheta(const ScenarioSpec& spec, std::size_t j, std::size_t n);

// vartheta_{[j,n]} = vartheta_{j+1,n} ... vartheta_{n,n} for j = 0..n.
std::vector<double> vartheta_products(const ScenarioSpec& spec, std::size_t n);

// 1 + rho_{[j,n]} (x - 1) <= Gbar_{j+1,n}(x) <= 1 + vartheta_{[j,n]} (x - 1)
struct Sandwich {
    double lower = 0.0;
    double upper = 0.0;
};
std::vector<Sandwich> sandwich_bounds(const ScenarioSpec& spec, std::size_t n, double x);

// (1 - x)^2 sum_j m_{j,1}^2 rho_{[j,n]}^2; Bernoulli immigration only.
double accompanying_gap_bound(const ScenarioSpec& spec, std::size_t n, double x);

struct ReportRow {
    std::size_t n = 0;
    double tv = 0.0;       // TV to the limit, or PGF sup-norm gap for ProductLaw
    double mean_gap = 0.0; // |E X_n - E Y|
    double m2_gap = 0.0;   // |E X_n(X_n-1) - E Y(Y-1)|
    double bound = 0.0;    // accompanying gap bound at x = 0 (NaN if not Bernoulli)
    double toeplitz = 0.0; // rho-weighted Toeplitz sum
    ConditionRatios ratios;
    bool truncated = false; // propagation lost more mass than the alarm level
    double mc_tv = -1.0;    // TV(simulated, propagated); negative when not run
};

struct ConvergenceReport {
    std::string law;
    // "tv" or "pgf_sup" (ProductLaw: sup over x_grid of |F_n(x) - g(x)|)
    std::string metric;
    std::size_t truncation = 0;
    std::vector<ReportRow> rows;
};

struct ReportOptions {
    std::size_t K = 64;
    std::size_t reps = 0; // Monte Carlo column when > 0
    std::uint64_t seed = 1;
    std::vector<double> x_grid; // ProductLaw metric grid; default 0, 0.1, ..., 1
    double tol = 1e-7;
};

// Throws WrongRegime when the scenario has no classified limit.
ConvergenceReport report(const ScenarioSpec& spec, std::span<const std::size_t> n_grid, const ReportOptions& opt);

// Header n,tv,mean_gap,m2_gap,bound,toeplitz (plus mc_tv when present); 17
// significant digits.
std::string report_csv(const ConvergenceReport& r);
std::string report_json(const ConvergenceReport& r);

} // namespace gwi
