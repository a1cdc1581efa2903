#pragma once

// Exact calculus for the composed maps Gbar_{j+1,n} = G_{j+1} o ... o G_n:
// closed-form linear fractional composition, exact F_n and its accompanying
// law under Bernoulli immigration, and the derivative recursions at x = 1.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gwi/linear_fractional.hpp"
#include "gwi/models.hpp"

namespace gwi {

// Parameters of Gbar_{j+1,n}, with Gbar_{n+1,n}(x) = x. Requires linear
// fractional or Bernoulli offspring (UnsupportedFamily otherwise). The second
// derivative is the closed sum sum_{i=j+1}^n G_i''(1) rho_{[j,i-1]} rho_{[i,n]}^2.
LinearFractional gbar_lf(const ScenarioSpec& spec, std::size_t j, std::size_t n);

// All Gbar_{j+1,n}, j = 0..n, from one backward sweep.
std::vector<LinearFractional> gbar_lf_all(const ScenarioSpec& spec, std::size_t n);

// F_n(x) = prod_{j=1}^n [1 + m_{j,1} (Gbar_{j+1,n}(x) - 1)] for Bernoulli
// immigration.
double exact_Fn_lf(const ScenarioSpec& spec, std::size_t n, double x);

// exp{sum_j m_{j,1} (Gbar_{j+1,n}(x) - 1)}
double accompanying_lf(const ScenarioSpec& spec, std::size_t n, double x);

inline constexpr std::size_t faa_k_max = 32;

// a_{k,i}: C(k,i) for i < k/2, C(k,k/2)/2 for i = k/2, zero beyond.
double a_coefficient(std::size_t k, std::size_t i);
const std::array<std::array<double, faa_k_max + 1>, faa_k_max + 1>& a_table();

// Coefficient of f''(g) in d^k/dx^k f(g(x)) given g_derivs[i-1] = g^{(i)},
// i = 1..k-1. Throws InvalidArgument when too few derivatives are supplied.
double faa_coefficient_f2(std::span<const double> g_derivs, std::size_t k);

// Partial Bell polynomials B_{k,s}(x_1, ..., x_{k-s+1}) for k, s <= k_max;
// result[k][s].
std::vector<std::vector<double>> partial_bell(std::span<const double> x, std::size_t k_max);

// Gbar_{j+1,n}^{(k)}(1) for j = 0..n and k = 1..k_max, filled by a backward
// sweep of the full Faa di Bruno recursion over the offspring derivatives.
class DerivTable {
public:
    DerivTable(std::size_t n, std::size_t k_max);

    std::size_t n() const noexcept { return n_; }
    std::size_t k_max() const noexcept { return k_max_; }
    double operator()(std::size_t j, std::size_t k) const { return values_.at(j * k_max_ + (k - 1)); }
    double& at(std::size_t j, std::size_t k) { return values_.at(j * k_max_ + (k - 1)); }

private:
    std::size_t n_;
    std::size_t k_max_;
    std::vector<double> values_;
};

DerivTable composed_derivs(const ScenarioSpec& spec, std::size_t n, std::size_t k_max);

// Same table through the second-order recursion
//   Gbar_{j,n}^{(k)}(1) = rho_j Gbar_{j+1,n}^{(k)}(1)
//                       + G_j''(1) sum_i a_{k,i} Gbar_{j+1,n}^{(i)}(1) Gbar_{j+1,n}^{(k-i)}(1),
// exact when every offspring PGF has degree at most two.
DerivTable composed_derivs_second_order(const ScenarioSpec& spec, std::size_t n, std::size_t k_max);

double composed_deriv_k(const ScenarioSpec& spec, std::size_t j, std::size_t n, std::size_t k);

// (k-1)! lambda (nu/2)^{k-1}; throws NumericError when the value overflows.
double asymptotic_deriv_k(double lambda, double nu, std::size_t k);

// sum_{j=1}^n m_{j,1} Gbar_{j+1,n}^{(k)}(1), k = 1..k_max (result[k-1]).
std::vector<double> weighted_deriv_sums(const ScenarioSpec& spec, std::size_t n, std::size_t k_max);

} // namespace gwi
