#include "gwi/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace gwi::kernels {

namespace {

struct Table {
    Isa isa;
    void (*axpy)(double, std::span<const double>, std::span<double>) noexcept;
    void (*scale)(double, std::span<double>) noexcept;
    double (*sum)(std::span<const double>) noexcept;
    double (*abs_diff_sum)(std::span<const double>, std::span<const double>) noexcept;
    double (*dot)(std::span<const double>, std::span<const double>) noexcept;
};

constexpr Table scalar_table{Isa::scalar, scalar::axpy, scalar::scale, scalar::sum, scalar::abs_diff_sum, scalar::dot};

bool cpu_supports(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(GWI_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    case Isa::neon:
#if defined(GWI_HAVE_NEON_KERNELS)
        return true;
#else
        return false;
#endif
    }
    return false;
}

bool forced_scalar() noexcept
{
    const char* env = std::getenv("GWI_SIMD");
    return env != nullptr && std::string_view(env) == "scalar";
}

Table select() noexcept
{
    if (forced_scalar())
        return scalar_table;
#if defined(GWI_HAVE_AVX2_KERNELS)
    if (cpu_supports(Isa::avx2))
        return {Isa::avx2, avx2::axpy, avx2::scale, avx2::sum, avx2::abs_diff_sum, avx2::dot};
#endif
#if defined(GWI_HAVE_NEON_KERNELS)
    return {Isa::neon, neon::axpy, neon::scale, neon::sum, neon::abs_diff_sum, neon::dot};
#endif
    return scalar_table;
}

const Table& table() noexcept
{
    static const Table t = select();
    return t;
}

} // namespace

std::string_view isa_name(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    case Isa::neon:
        return "neon";
    }
    return "unknown";
}

Isa active_isa() noexcept { return table().isa; }

bool isa_available(Isa isa) noexcept { return cpu_supports(isa); }

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept { table().axpy(a, x, y); }

void scale(double a, std::span<double> x) noexcept { table().scale(a, x); }

double sum(std::span<const double> x) noexcept { return table().sum(x); }

double abs_diff_sum(std::span<const double> x, std::span<const double> y) noexcept
{
    return table().abs_diff_sum(x, y);
}

double dot(std::span<const double> x, std::span<const double> y) noexcept { return table().dot(x, y); }

} // namespace gwi::kernels
