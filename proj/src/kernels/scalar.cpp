#include "gwi/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace gwi::kernels::scalar {

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept
{
    const std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i)
        y[i] += a * x[i];
}

void scale(double a, std::span<double> x) noexcept
{
    for (double& v : x)
        v *= a;
}

double sum(std::span<const double> x) noexcept
{
    double s = 0.0;
    for (double v : x)
        s += v;
    return s;
}

double abs_diff_sum(std::span<const double> x, std::span<const double> y) noexcept
{
    const std::size_t n = std::min(x.size(), y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += std::fabs(x[i] - y[i]);
    return s;
}

double dot(std::span<const double> x, std::span<const double> y) noexcept
{
    const std::size_t n = std::min(x.size(), y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += x[i] * y[i];
    return s;
}

} // namespace gwi::kernels::scalar
