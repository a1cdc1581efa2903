#include "gwi/laws.hpp"

#include <cmath>

#include "gwi/detail/format.hpp"
#include "gwi/error.hpp"

namespace gwi {

namespace {

using detail::fmt17;

const char* rule_name(LambdaRule::Kind k)
{
    switch (k) {
    case LambdaRule::Kind::none:
        return "none";
    case LambdaRule::Kind::list:
        return "list";
    case LambdaRule::Kind::log2:
        return "log2";
    case LambdaRule::Kind::negative_binomial:
        return "nb";
    case LambdaRule::Kind::geometric:
        return "geometric";
    }
    return "?";
}

} // namespace

double IntensityMeasure::total() const
{
    double s = 0.0;
    for (double a : atoms)
        s += a;
    return s;
}

double LambdaRule::centered(std::size_t l) const
{
    if (l == 0)
        throw InvalidArgument("lambda_l is indexed from l = 1");
    const double dl = static_cast<double>(l);
    switch (kind) {
    case Kind::none:
        return 0.0;
    case Kind::list:
        if (l > values.size())
            return 0.0;
        return values[l - 1] / std::exp(std::lgamma(dl + 1.0));
    case Kind::log2:
        return 1.0 / (dl * dl);
    case Kind::negative_binomial:
        return lambda * std::pow(nu / 2.0, dl - 1.0) / dl;
    case Kind::geometric:
        if (c == 0.0)
            return 0.0;
        return std::copysign(std::exp(dl * std::log(std::fabs(c)) - std::lgamma(dl + 1.0)),
                             (c < 0.0 && l % 2 == 1) ? -1.0 : 1.0);
    }
    return 0.0;
}

double LambdaRule::value(std::size_t l) const
{
    if (kind == Kind::list)
        return l >= 1 && l <= values.size() ? values[l - 1] : 0.0;
    if (kind == Kind::geometric)
        return std::pow(c, static_cast<double>(l));
    return centered(l) * std::exp(std::lgamma(static_cast<double>(l) + 1.0));
}

std::string describe(const LimitLaw& law)
{
    struct Visitor {
        std::string operator()(const PoissonLaw& p) const { return "Poisson lambda=" + fmt17(p.lambda); }
        std::string operator()(const CompoundPoissonLaw& cp) const
        {
            std::string s = "CompoundPoisson mu=[";
            for (std::size_t j = 0; j < cp.mu.atoms.size(); ++j) {
                if (j)
                    s += ", ";
                s += fmt17(cp.mu.atoms[j]);
            }
            return s + "]";
        }
        std::string operator()(const NegativeBinomialLaw& nb) const
        {
            return "NegativeBinomial r=" + fmt17(nb.params.r) + " p=" + fmt17(nb.params.p);
        }
        std::string operator()(const GeneralExpLaw& g) const
        {
            return std::string("GeneralExp lambda_l=") + rule_name(g.rule.kind);
        }
        std::string operator()(const ProductLaw&) const { return "ProductLaw"; }
        std::string operator()(const Unclassified& u) const { return "Unclassified: " + u.reason; }
    };
    return std::visit(Visitor{}, law);
}

} // namespace gwi
