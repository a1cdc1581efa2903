#include "gwi/linear_fractional.hpp"

#include <cmath>

#include "gwi/error.hpp"

namespace gwi {

double LinearFractional::operator()(double x) const noexcept
{
    return 1.0 - alpha * (1.0 - x) / ((1.0 - beta) * (1.0 - beta * x));
}

double LinearFractional::deriv_at_1(std::size_t s) const noexcept
{
    if (s == 0)
        return 1.0;
    double v = alpha / ((1.0 - beta) * (1.0 - beta));
    for (std::size_t i = 2; i <= s; ++i)
        v *= static_cast<double>(i) * beta / (1.0 - beta);
    return v;
}

double LinearFractional::prob(std::size_t k) const noexcept
{
    if (k == 0)
        return 1.0 - alpha / (1.0 - beta);
    return alpha * std::pow(beta, static_cast<double>(k - 1));
}

LinearFractional lf_from_derivatives(double d1, double d2)
{
    if (!(d1 > 0.0))
        throw InvalidArgument("linear fractional inversion needs f'(1) > 0");
    if (!(d2 >= 0.0))
        throw InvalidArgument("linear fractional inversion needs f''(1) >= 0");
    const double denom = 2.0 * d1 + d2;
    return {4.0 * d1 * d1 * d1 / (denom * denom), d2 / denom};
}

LinearFractional lf_compose(const LinearFractional& outer, const LinearFractional& inner)
{
    const double o1 = outer.deriv_at_1(1);
    const double o2 = outer.deriv_at_1(2);
    const double i1 = inner.deriv_at_1(1);
    const double i2 = inner.deriv_at_1(2);
    return lf_from_derivatives(o1 * i1, o2 * i1 * i1 + o1 * i2);
}

} // namespace gwi
