#pragma once

// Linear fractional generating functions
//
//     f(s) = 1 - alpha / (1 - beta) + alpha s / (1 - beta s),
//
// with alpha in (0, 1], beta in [0, 1) and alpha + beta <= 1. beta = 0 is the
// Bernoulli(alpha) thinning map, so one type covers both offspring families
// that admit closed-form composition.

#include <cstddef>

namespace gwi {

struct LinearFractional {
    double alpha = 1.0;
    double beta = 0.0;

    static constexpr LinearFractional identity() noexcept { return {1.0, 0.0}; }

    // f(x), written as 1 - alpha (1 - x) / ((1 - beta)(1 - beta x)) to avoid
    // cancellation near x = 1.
    double operator()(double x) const noexcept;

    // f^{(s)}(1) = s! alpha beta^{s-1} / (1 - beta)^{s+1}
    double deriv_at_1(std::size_t s) const noexcept;

    // P(0) = 1 - alpha / (1 - beta); P(k) = alpha beta^{k-1} for k >= 1.
    double prob(std::size_t k) const noexcept;

    bool operator==(const LinearFractional&) const = default;
};

// Inverts (f'(1), f''(1)) -> (alpha, beta). Throws InvalidArgument for
// d1 <= 0 or d2 < 0.
LinearFractional lf_from_derivatives(double d1, double d2);

// outer(inner(x)), via the chain rule at 1 and lf_from_derivatives.
LinearFractional lf_compose(const LinearFractional& outer, const LinearFractional& inner);

} // namespace gwi
