#pragma once

// Constructors and evaluators for the limit laws: Poisson, compound Poisson
// (finite and series intensities), the general exponential form, negative
// binomial, and the infinite-product law of the convergent regime.

#include <cstddef>
#include <span>

#include "gwi/laws.hpp"
#include "gwi/models.hpp"
#include "gwi/pgf.hpp"

namespace gwi {

// Poisson(lambda) truncated at K; Poisson(0) is the point mass at zero.
Pmf poisson_pmf(double lambda, std::size_t K);

// mu{j} = (1/j!) sum_{i=0}^{J-j-1} (-1)^i / i! lambda_{j+i}, j < J, from
// lambda_1..lambda_J with lambda_J = 0.
IntensityMeasure cp_intensity_finite(std::span<const double> lambdas);

// mu{j} = (1/j!) sum_{i >= 0} (-1)^i / i! lambda_{j+i} for j = 1..j_max.
// Each series is accepted after 30 consecutive increments below tol with
// non-increasing alternating terms; otherwise SeriesDivergence names the
// offending j.
IntensityMeasure cp_intensity_series(const LambdaRule& rule, double tol, std::size_t j_max = 64);

// Atom j of the compound Poisson intensity behind lambda_l = (l-1)!/l:
// (1/j) [log 2 - sum_{k<j} 1/(k 2^k)].
double log2_intensity(std::size_t j);
IntensityMeasure log2_intensity_measure(std::size_t j_max);

// PMF with generating function exp{sum_j mu{j} (x^j - 1)}.
Pmf compound_poisson_pmf(const IntensityMeasure& mu, std::size_t K);
double compound_poisson_pgf(const IntensityMeasure& mu, double x);

// sum_l lambda_l (x-1)^l / l!, summed to tol (the alternating tail at x = 0
// is averaged between consecutive partial sums).
double centered_exponent(const LambdaRule& rule, double x, double tol = 1e-13);

struct PowerBasisExpansion {
    std::vector<double> coeffs; // x-basis coefficients a_0..a_{K-1}
    std::size_t terms_used = 0; // centered terms consumed
};

// x-basis coefficients of sum_l c_l (x-1)^l for c_l = lambda_l / l!, each
// summed until the transformed terms settle below tol. Throws
// SeriesDivergence when a coefficient's binomial sum does not converge.
PowerBasisExpansion centered_rule_to_power_basis(const LambdaRule& rule, std::size_t K, double tol = 1e-15);

// Law with generating function exp{sum_l lambda_l (x-1)^l / l!}.
Pmf general_limit_pmf(const LambdaRule& rule, std::size_t K, double tol = 1e-15);

// NB(2 lambda / nu, nu / (2 + nu)); requires lambda > 0, nu > 0.
NegBinParams nb_from_scenario(double lambda, double nu);
Pmf nb_pmf(double r, double p, std::size_t K);
inline Pmf nb_pmf(const NegBinParams& nb, std::size_t K) { return nb_pmf(nb.r, nb.p, K); }
double nb_pgf(const NegBinParams& nb, double x);

struct ProductLawValue {
    double value = 1.0;
    std::size_t terms = 0;   // J: immigration factors kept
    std::size_t horizon = 0; // N: composition depth standing in for infinity
};

// g(x) = prod_j H_j(Gbar_{j+1,inf}(x)) for the convergent regime. J is the
// smallest power of two whose log-tail bound falls below tol; the depth N
// doubles from J until successive values differ by less than tol / 10.
ProductLawValue product_law_eval_detailed(const ScenarioSpec& spec, double x, double tol);
double product_law_eval(const ScenarioSpec& spec, double x, double tol);

// First and second factorial moments of the product law.
struct LimitMoments {
    double m1 = 0.0;
    double m2 = 0.0;
};
LimitMoments product_law_moments(const ScenarioSpec& spec, double tol);

// sin(pi sqrt(1-x)) / (pi sqrt(1-x)), the closed-form product limit for
// rho_n = 1 - 1/n^2 with Bernoulli laws and m_{j,1} = (j+1)/j^3.
double example1_closed_form(double x);

// PMF of a classified limit law. ProductLaw and Unclassified throw
// WrongRegime. A GeneralExp law whose x-basis expansion diverges falls back to
// a closed-form compound Poisson intensity when one is known for the rule.
Pmf limit_pmf(const LimitLaw& law, std::size_t K);

// Smallest K whose limit-law tail mass falls below 1e-10, doubled (at most
// 4096); 64 for laws without a closed-form PMF.
std::size_t default_truncation(const LimitLaw& law);

// Generating function of a limit law at x (ProductLaw evaluated from spec).
double limit_pgf(const LimitLaw& law, const ScenarioSpec& spec, double x, double tol = 1e-9);

// First two factorial moments of a limit law.
LimitMoments limit_moments(const LimitLaw& law, const ScenarioSpec& spec, double tol = 1e-9);

} // namespace gwi
