#pragma once

// Data-parallel inner loops of the coefficient arithmetic. Every kernel has a
// portable scalar reference in gwi::kernels::scalar and, where the target
// supports it, a SIMD variant (AVX2 on x86-64, NEON on AArch64). The
// top-level functions dispatch once, at first use, to the best variant the
// running CPU supports. Setting GWI_SIMD=scalar in the environment forces the
// reference path.
//
// axpy and scale are elementwise and produce bit-identical results on every
// path. The reductions reassociate, so SIMD and scalar agree only to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace gwi::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

// ISA selected for this process.
Isa active_isa() noexcept;

// ISAs compiled in and supported by the running CPU.
bool isa_available(Isa isa) noexcept;

// y[i] += a * x[i] for i < min(|x|, |y|)
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;

// x[i] *= a
void scale(double a, std::span<double> x) noexcept;

double sum(std::span<const double> x) noexcept;

// sum |x[i] - y[i]| over the common prefix
double abs_diff_sum(std::span<const double> x, std::span<const double> y) noexcept;

double dot(std::span<const double> x, std::span<const double> y) noexcept;

namespace scalar {
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;
void scale(double a, std::span<double> x) noexcept;
double sum(std::span<const double> x) noexcept;
double abs_diff_sum(std::span<const double> x, std::span<const double> y) noexcept;
double dot(std::span<const double> x, std::span<const double> y) noexcept;
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
#define GWI_HAVE_AVX2_KERNELS 1
namespace avx2 {
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;
void scale(double a, std::span<double> x) noexcept;
double sum(std::span<const double> x) noexcept;
double abs_diff_sum(std::span<const double> x, std::span<const double> y) noexcept;
double dot(std::span<const double> x, std::span<const double> y) noexcept;
} // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define GWI_HAVE_NEON_KERNELS 1
namespace neon {
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;
void scale(double a, std::span<double> x) noexcept;
double sum(std::span<const double> x) noexcept;
double abs_diff_sum(std::span<const double> x, std::span<const double> y) noexcept;
double dot(std::span<const double> x, std::span<const double> y) noexcept;
} // namespace neon
#endif

} // namespace gwi::kernels
