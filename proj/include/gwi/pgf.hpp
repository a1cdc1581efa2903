#pragma once

// Truncated coefficient arithmetic for distributions on {0, 1, 2, ...}.
//
// A Pmf holds P(X = k) for k < K together with the deficiency, the mass that
// fell beyond the truncation bound. Deficiency is tracked and never
// renormalized away. The same vector doubles as the coefficients of the
// probability generating function E x^X.

#include <cstddef>
#include <span>
#include <vector>

namespace gwi {

// Negative coefficients above this are roundoff and get clamped to zero.
inline constexpr double negative_clamp_tol = 1e-12;

class Pmf {
public:
    // Point mass at zero.
    Pmf();

    // Takes ownership of coefficients. Entries in [-negative_clamp_tol, 0) are
    // clamped; anything more negative, non-finite, or a total above one
    // throws InvalidArgument.
    explicit Pmf(std::vector<double> coeffs);

    static Pmf delta(std::size_t k);
    static Pmf bernoulli(double p);

    std::span<const double> coeffs() const noexcept { return coeffs_; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    double operator[](std::size_t k) const noexcept { return k < coeffs_.size() ? coeffs_[k] : 0.0; }

    // 1 - sum of coefficients, floored at zero.
    double deficiency() const noexcept { return deficiency_; }
    double mass() const noexcept { return 1.0 - deficiency_; }

    bool operator==(const Pmf&) const = default;

private:
    std::vector<double> coeffs_;
    double deficiency_ = 0.0;
};

// Coefficients c_l of sum_l c_l (x - 1)^l.
struct CenteredSeries {
    std::vector<double> coeffs;
};

// m[k-1] = E[X(X-1)...(X-k+1)], k = 1..k_max.
struct FactorialMoments {
    std::vector<double> m;
    double operator()(std::size_t k) const { return m.at(k - 1); }
};

// Truncated product: coefficient k < K of a * b.
Pmf convolve(const Pmf& a, const Pmf& b, std::size_t K);

// Law of a count-indexed sum of i.i.d. jumps, i.e. the coefficients of
// count(jump(x)) truncated at K. Powers of the jump PGF are accumulated with
// the count weights until the remaining count tail drops below 1e-15.
Pmf compound(const Pmf& count, const Pmf& jump, std::size_t K);

// PGF value sum_k p_k x^k, x in [0, 1].
double eval(const Pmf& p, double x);

double factorial_moment(const Pmf& p, std::size_t k);
FactorialMoments factorial_moments(const Pmf& p, std::size_t k_max);

// Binomial transform between sum p_k x^k and sum c_l (x - 1)^l.
CenteredSeries to_centered(const Pmf& p);
std::vector<double> to_power_basis(const CenteredSeries& c, std::size_t K);
Pmf from_centered(const CenteredSeries& c, std::size_t K);

// Coefficients of exp(sum_k a_k x^k) truncated at K, by the recurrence
// b_0 = e^{a_0}, n b_n = sum_{k=1..n} k a_k b_{n-k}. Not validated.
std::vector<double> exp_power_series(std::span<const double> a, std::size_t K);

// Pmf of exp(sum_l c_l (x - 1)^l). Requires c_0 = 0. Throws NotADistribution
// when a coefficient is below -negative_clamp_tol.
Pmf exp_centered(const CenteredSeries& c, std::size_t K);

// Validates raw coefficients produced by a series expansion.
Pmf pmf_from_series(std::vector<double> coeffs, const char* what);

} // namespace gwi
