#pragma once

// Limit distributions reachable by the process, as a tagged union.

#include <string>
#include <variant>
#include <vector>

namespace gwi {

// Atoms mu{j}, j = 1..J_max, of a compound Poisson intensity (atoms[j-1]).
struct IntensityMeasure {
    std::vector<double> atoms;
    // Bound on the mass of the neglected atoms beyond J_max.
    double tail_bound = 0.0;
    // Number of series terms used for the slowest-converging atom (0 when the
    // atoms came from a closed form).
    std::size_t terms_used = 0;

    double total() const;
    bool operator==(const IntensityMeasure&) const = default;
};

struct NegBinParams {
    double r = 1.0;
    double p = 0.5;
    bool operator==(const NegBinParams&) const = default;
};

// Limit-exponent rule: lambda_l = lim m_{n,l} / (l (1 - rho_n)). Stored through
// the centered coefficient c_l = lambda_l / l!, which stays finite for every
// rule used here.
struct LambdaRule {
    enum class Kind {
        none,              // nothing declared
        list,              // explicit lambda_1..lambda_J, zero afterwards
        log2,              // lambda_l = (l-1)!/l
        negative_binomial, // lambda_l = (l-1)! lambda (nu/2)^{l-1}
        geometric,         // lambda_l = c^l
    };

    Kind kind = Kind::none;
    std::vector<double> values;
    double lambda = 0.0;
    double nu = 0.0;
    double c = 0.0;

    bool declared() const noexcept { return kind != Kind::none; }
    // True when only finitely many lambda_l are nonzero.
    bool finite() const noexcept { return kind == Kind::list; }
    // lambda_l / l!, l >= 1.
    double centered(std::size_t l) const;
    // lambda_l; may overflow to infinity for factorially growing rules.
    double value(std::size_t l) const;

    bool operator==(const LambdaRule&) const = default;
};

struct PoissonLaw {
    double lambda = 0.0;
};
struct CompoundPoissonLaw {
    IntensityMeasure mu;
};
struct NegativeBinomialLaw {
    NegBinParams params;
};
// exp{sum_l lambda_l (x-1)^l / l!} without a known compound Poisson form.
struct GeneralExpLaw {
    LambdaRule rule;
};
// Infinite-product limit of the convergent regime; evaluated from the scenario.
struct ProductLaw {};
// The scenario is outside every limit regime implemented here.
struct Unclassified {
    std::string reason;
};

using LimitLaw =
    std::variant<PoissonLaw, CompoundPoissonLaw, NegativeBinomialLaw, GeneralExpLaw, ProductLaw, Unclassified>;

// One-line description, e.g. "NegativeBinomial r=2 p=0.33333333333333331".
std::string describe(const LimitLaw& law);

} // namespace gwi
