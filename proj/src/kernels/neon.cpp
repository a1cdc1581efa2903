#include "gwi/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <arm_neon.h>

namespace gwi::kernels::neon {

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept
{
    const std::size_t n = std::min(x.size(), y.size());
    const double* xp = x.data();
    double* yp = y.data();
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(yp + i, vaddq_f64(vld1q_f64(yp + i), vmulq_f64(va, vld1q_f64(xp + i))));
    for (; i < n; ++i)
        yp[i] += a * xp[i];
}

void scale(double a, std::span<double> x) noexcept
{
    const std::size_t n = x.size();
    double* xp = x.data();
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(xp + i, vmulq_f64(va, vld1q_f64(xp + i)));
    for (; i < n; ++i)
        xp[i] *= a;
}

double sum(std::span<const double> x) noexcept
{
    const std::size_t n = x.size();
    const double* xp = x.data();
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vaddq_f64(acc, vld1q_f64(xp + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i)
        s += xp[i];
    return s;
}

double abs_diff_sum(std::span<const double> x, std::span<const double> y) noexcept
{
    const std::size_t n = std::min(x.size(), y.size());
    const double* xp = x.data();
    const double* yp = y.data();
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(xp + i), vld1q_f64(yp + i)));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i)
        s += std::fabs(xp[i] - yp[i]);
    return s;
}

double dot(std::span<const double> x, std::span<const double> y) noexcept
{
    const std::size_t n = std::min(x.size(), y.size());
    const double* xp = x.data();
    const double* yp = y.data();
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(xp + i), vld1q_f64(yp + i)));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i)
        s += xp[i] * yp[i];
    return s;
}

} // namespace gwi::kernels::neon
