#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "gwi/kernels.hpp"

namespace k = gwi::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(rng);
    return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

double reference_sum(const std::vector<double>& v)
{
    long double s = 0.0L;
    for (double x : v)
        s += x;
    return static_cast<double>(s);
}

template <class Axpy, class Scale, class Sum, class AbsDiff, class Dot>
void check_variant(Axpy axpy, Scale scale, Sum sum, AbsDiff abs_diff_sum, Dot dot)
{
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 63u, 64u, 1000u, 1027u}) {
        CAPTURE(n);
        const auto x = random_vec(rng, n);
        const auto y0 = random_vec(rng, n);

        auto y_ref = y0, y_simd = y0;
        k::scalar::axpy(0.37, x, y_ref);
        axpy(0.37, x, y_simd);
        CHECK(bit_equal(y_ref, y_simd));

        auto s_ref = x, s_simd = x;
        k::scalar::scale(-1.75, s_ref);
        scale(-1.75, s_simd);
        CHECK(bit_equal(s_ref, s_simd));

        const double tol = 1e-14 * static_cast<double>(n + 1);
        CHECK(std::fabs(sum(x) - k::scalar::sum(x)) <= tol);
        CHECK(std::fabs(abs_diff_sum(x, y0) - k::scalar::abs_diff_sum(x, y0)) <= tol);
        CHECK(std::fabs(dot(x, y0) - k::scalar::dot(x, y0)) <= tol);
    }
}

} // namespace

TEST_SUITE("kernels")
{
    TEST_CASE("scalar reference matches long double accumulation")
    {
        std::mt19937_64 rng(3);
        const auto x = random_vec(rng, 513);
        CHECK(std::fabs(k::scalar::sum(x) - reference_sum(x)) < 1e-13);
        std::vector<double> y(x.size(), 0.0);
        CHECK(std::fabs(k::scalar::abs_diff_sum(x, y) - [&] {
                  long double s = 0.0L;
                  for (double v : x)
                      s += std::fabs(v);
                  return static_cast<double>(s);
              }()) < 1e-13);
    }

    TEST_CASE("mismatched lengths use the common prefix")
    {
        const std::vector<double> a{1.0, 2.0, 3.0};
        const std::vector<double> b{1.0, 1.0};
        CHECK(k::abs_diff_sum(a, b) == doctest::Approx(1.0));
        CHECK(k::dot(a, b) == doctest::Approx(3.0));
        std::vector<double> y{0.0, 0.0};
        k::axpy(2.0, a, y);
        CHECK(y == std::vector<double>{2.0, 4.0});
    }

#ifdef GWI_HAVE_AVX2_KERNELS
    TEST_CASE("avx2 variants agree with the scalar reference")
    {
        if (!k::isa_available(k::Isa::avx2)) {
            MESSAGE("AVX2 not supported by this CPU; skipped");
            return;
        }
        check_variant(k::avx2::axpy, k::avx2::scale, k::avx2::sum, k::avx2::abs_diff_sum, k::avx2::dot);
    }
#endif

#ifdef GWI_HAVE_NEON_KERNELS
    TEST_CASE("neon variants agree with the scalar reference")
    {
        check_variant(k::neon::axpy, k::neon::scale, k::neon::sum, k::neon::abs_diff_sum, k::neon::dot);
    }
#endif

    TEST_CASE("dispatched kernels agree with the scalar reference")
    {
        check_variant(k::axpy, k::scale, k::sum, k::abs_diff_sum, k::dot);
        CHECK(k::isa_available(k::Isa::scalar));
        CHECK(k::isa_available(k::active_isa()));
        CHECK(!k::isa_name(k::active_isa()).empty());
    }
}
