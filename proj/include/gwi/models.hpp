#pragma once

// Offspring and immigration families indexed by generation n, the scenario
// that packages them with the declared asymptotic constants, and the regime
// classifier.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gwi/laws.hpp"
#include "gwi/linear_fractional.hpp"
#include "gwi/pgf.hpp"

namespace gwi {

// rho_n = 1 - c (n + n0)^{-gamma}. The deficit 1 - rho_n is evaluated
// directly so that it keeps full relative precision as rho_n -> 1.
struct RhoRule {
    double c = 1.0;
    double gamma = 1.0;
    double n0 = 0.0;

    double deficit(std::size_t n) const;
    double rho(std::size_t n) const { return 1.0 - deficit(n); }
    // sum (1 - rho_n) = infinity iff gamma <= 1.
    bool divergent() const noexcept { return gamma <= 1.0; }

    bool operator==(const RhoRule&) const = default;
};

// A nonnegative sequence indexed by generation: immigration means or mixture
// weights.
struct SequenceRule {
    enum class Kind {
        constant,     // a
        proportional, // a (1 - rho_n)
        power_sum,    // sum_i coef_i n^{exp_i}
    };
    struct Term {
        double coef = 0.0;
        double exponent = 0.0;
        bool operator==(const Term&) const = default;
    };

    Kind kind = Kind::constant;
    double a = 0.0;
    std::vector<Term> terms;

    double at(std::size_t n, double rho_deficit) const;
    bool operator==(const SequenceRule&) const = default;
};

enum class OffspringKind { bernoulli, quadratic, linear_fractional, custom };
enum class ImmigrationKind { bernoulli, poisson, custom };

struct OffspringFamily {
    OffspringKind kind = OffspringKind::bernoulli;
    RhoRule rho;
    // G_n''(1) = nu (1 - rho_n) for quadratic and linear_fractional.
    double nu = 0.0;
    // custom: generation n uses table[min(n, size) - 1].
    std::vector<std::vector<double>> table;

    double deficit(std::size_t n) const;
    double mean(std::size_t n) const { return 1.0 - deficit(n); }
    bool divergent() const;
    // Quadratic coefficients (p0, p1, p2); throws ValidationError when the
    // generation is outside the admissibility window.
    std::vector<double> quadratic_coeffs(std::size_t n) const;
    LinearFractional linear_fractional(std::size_t n) const;
    Pmf pmf(std::size_t n, std::size_t K) const;

    bool operator==(const OffspringFamily&) const = default;
};

struct ImmigrationFamily {
    ImmigrationKind kind = ImmigrationKind::bernoulli;
    // bernoulli/poisson: the mean m_{n,1}; custom: the mixture weight w_n in
    // H_n = 1 - w_n + w_n H.
    SequenceRule rate;
    // custom: PMF of H.
    std::vector<double> base;

    bool operator==(const ImmigrationFamily&) const = default;
};

struct DeclaredConstants {
    double lambda = 0.0;
    double nu = 0.0;
    LambdaRule lambda_l;
    // sum (1 - rho_n) = infinity
    bool divergent = true;

    bool operator==(const DeclaredConstants&) const = default;
};

// Run defaults carried by scenario files; command-line flags override them.
struct RunDefaults {
    std::size_t horizon = 100;
    std::size_t truncation = 0; // 0: chosen from the limit law
    std::size_t reps = 10000;
    std::uint64_t seed = 1;
    std::vector<std::size_t> n_grid;
    std::vector<double> x_grid;
    double tol = 1e-7;

    bool operator==(const RunDefaults&) const = default;
};

struct ScenarioSpec {
    std::string name;
    OffspringFamily offspring;
    ImmigrationFamily immigration;
    DeclaredConstants declared;
    RunDefaults run;

    double rho(std::size_t n) const { return offspring.mean(n); }
    double deficit(std::size_t n) const { return offspring.deficit(n); }

    // m_{n,k} = H_n^{(k)}(1)
    double immigration_moment(std::size_t n, std::size_t k) const;
    double immigration_mean(std::size_t n) const { return immigration_moment(n, 1); }
    // H_n(x); Bernoulli uses the affine form 1 + m (x - 1) for any m.
    double immigration_pgf(std::size_t n, double x) const;
    // Throws ValidationError when H_n is not a distribution (Bernoulli with
    // m_{n,1} > 1).
    Pmf immigration_pmf(std::size_t n, std::size_t K) const;

    bool operator==(const ScenarioSpec&) const = default;
};

// G_n(x), x in [0, 1].
double offspring_pgf_at(const OffspringFamily& fam, std::size_t n, double x);

// G_n^{(s)}(1), s >= 1.
double offspring_deriv_at_1(const OffspringFamily& fam, std::size_t n, std::size_t s);

// Hard invariant checks (throws ValidationError listing every violation) and
// soft cross-checks of the declared constants against the rules at n = N
// (returned as warnings).
std::vector<std::string> validate(const ScenarioSpec& spec);

// lim_{n -> inf} rule(n) / (1 - rho_n), decided from the closed forms.
double asymptotic_ratio(const SequenceRule& rule, const OffspringFamily& fam);

// True when sum_n rule(n) < infinity, decided from the closed forms.
bool summable(const SequenceRule& rule, const OffspringFamily& fam);

LimitLaw regime_classify(const ScenarioSpec& spec);

struct ConditionRatios {
    double m1_ratio = 0.0;      // m_{n,1} / (1 - rho_n)
    double m2_ratio = 0.0;      // m_{n,2} / (1 - rho_n)
    double g2_ratio = 0.0;      // G_n''(1) / (1 - rho_n)
    double g3_ratio = 0.0;      // G_n'''(1) / (1 - rho_n)
    double deficit_sum = 0.0;   // sum_{j <= n} (1 - rho_j)
};

ConditionRatios condition_ratios(const ScenarioSpec& spec, std::size_t n);

// rho_{[j,n]} = rho_{j+1} ... rho_n for fixed n and 0 <= j <= n, from suffix
// sums of log rho_l.
class RhoChain {
public:
    RhoChain(const OffspringFamily& fam, std::size_t n);

    std::size_t n() const noexcept { return n_; }
    double prod(std::size_t j) const;
    double log_prod(std::size_t j) const { return log_suffix_.at(j); }
    // 1 - rho_l, 1 <= l <= n
    double deficit(std::size_t l) const { return deficit_.at(l); }
    double rho(std::size_t l) const { return 1.0 - deficit_.at(l); }

private:
    std::size_t n_;
    std::vector<double> deficit_;
    std::vector<double> log_suffix_;
};

} // namespace gwi
