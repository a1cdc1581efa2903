// Compiled with -mavx2; only reached after a runtime CPU check.
#include "gwi/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <immintrin.h>

namespace gwi::kernels::avx2 {

namespace {

inline double hsum(__m256d v) noexcept
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept
{
    const std::size_t n = std::min(x.size(), y.size());
    const double* xp = x.data();
    double* yp = y.data();
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d y0 = _mm256_add_pd(_mm256_loadu_pd(yp + i), _mm256_mul_pd(va, _mm256_loadu_pd(xp + i)));
        const __m256d y1 =
            _mm256_add_pd(_mm256_loadu_pd(yp + i + 4), _mm256_mul_pd(va, _mm256_loadu_pd(xp + i + 4)));
        _mm256_storeu_pd(yp + i, y0);
        _mm256_storeu_pd(yp + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(yp + i, _mm256_add_pd(_mm256_loadu_pd(yp + i), _mm256_mul_pd(va, _mm256_loadu_pd(xp + i))));
    for (; i < n; ++i)
        yp[i] += a * xp[i];
}

void scale(double a, std::span<double> x) noexcept
{
    const std::size_t n = x.size();
    double* xp = x.data();
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(xp + i, _mm256_mul_pd(va, _mm256_loadu_pd(xp + i)));
    for (; i < n; ++i)
        xp[i] *= a;
}

double sum(std::span<const double> x) noexcept
{
    const std::size_t n = x.size();
    const double* xp = x.data();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(xp + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(xp + i + 4));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        s += xp[i];
    return s;
}

double abs_diff_sum(std::span<const double> x, std::span<const double> y) noexcept
{
    const std::size_t n = std::min(x.size(), y.size());
    const double* xp = x.data();
    const double* yp = y.data();
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(xp + i), _mm256_loadu_pd(yp + i));
        acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
    }
    double s = hsum(acc);
    for (; i < n; ++i)
        s += std::fabs(xp[i] - yp[i]);
    return s;
}

double dot(std::span<const double> x, std::span<const double> y) noexcept
{
    const std::size_t n = std::min(x.size(), y.size());
    const double* xp = x.data();
    const double* yp = y.data();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(xp + i), _mm256_loadu_pd(yp + i)));
    double s = hsum(acc);
    for (; i < n; ++i)
        s += xp[i] * yp[i];
    return s;
}

} // namespace gwi::kernels::avx2
