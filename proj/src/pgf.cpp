#include "gwi/pgf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gwi/detail/compensated.hpp"
#include "gwi/error.hpp"
#include "gwi/kernels.hpp"

namespace gwi {

namespace {

constexpr double count_tail_cutoff = 1e-15;

void require_truncation(std::size_t K)
{
    if (K == 0)
        throw InvalidArgument("truncation length K must be positive");
}

// r = (p * q) truncated at K, for p and q nonnegative; r is overwritten.
void truncated_product(std::span<const double> p, std::span<const double> q, std::vector<double>& r, std::size_t K)
{
    const std::size_t len = std::min(K, p.size() + q.size() - 1);
    r.assign(len, 0.0);
    for (std::size_t i = 0; i < p.size() && i < len; ++i) {
        if (p[i] == 0.0)
            continue;
        const std::size_t n = std::min(q.size(), len - i);
        kernels::axpy(p[i], q.first(n), std::span<double>(r).subspan(i, n));
    }
}

// Pascal row update: row holds C(l, k) for k < row.size(); advances to l + 1.
void advance_pascal(std::vector<double>& row)
{
    for (std::size_t k = row.size(); k-- > 1;)
        row[k] += row[k - 1];
}

} // namespace

Pmf::Pmf() : coeffs_{1.0} {}

Pmf::Pmf(std::vector<double> coeffs) : coeffs_(std::move(coeffs))
{
    if (coeffs_.empty())
        throw InvalidArgument("Pmf needs at least one coefficient");
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        double& v = coeffs_[k];
        if (!std::isfinite(v))
            throw InvalidArgument("Pmf coefficient " + std::to_string(k) + " is not finite");
        if (v < 0.0) {
            if (v < -negative_clamp_tol)
                throw InvalidArgument("Pmf coefficient " + std::to_string(k) + " is negative");
            v = 0.0;
        }
    }
    const double total = kernels::sum(coeffs_);
    if (total > 1.0 + negative_clamp_tol)
        throw InvalidArgument("Pmf coefficients sum to more than one");
    deficiency_ = std::max(0.0, 1.0 - total);
}

Pmf Pmf::delta(std::size_t k)
{
    std::vector<double> c(k + 1, 0.0);
    c[k] = 1.0;
    return Pmf(std::move(c));
}

Pmf Pmf::bernoulli(double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw InvalidArgument("Bernoulli parameter outside [0, 1]");
    return Pmf({1.0 - p, p});
}

Pmf convolve(const Pmf& a, const Pmf& b, std::size_t K)
{
    require_truncation(K);
    std::vector<double> r;
    truncated_product(a.coeffs(), b.coeffs(), r, K);
    return Pmf(std::move(r));
}

Pmf compound(const Pmf& count, const Pmf& jump, std::size_t K)
{
    require_truncation(K);
    const auto c = count.coeffs();

    // tail[k] = sum_{i > k} c_i
    std::vector<double> tail(c.size(), 0.0);
    for (std::size_t k = c.size() - 1; k-- > 0;)
        tail[k] = tail[k + 1] + c[k + 1];

    std::vector<double> result(1, c[0]);
    std::vector<double> power{1.0};
    std::vector<double> next;
    for (std::size_t k = 1; k < c.size(); ++k) {
        if (tail[k - 1] < count_tail_cutoff)
            break;
        truncated_product(power, jump.coeffs(), next, K);
        power.swap(next);
        if (c[k] == 0.0)
            continue;
        if (result.size() < power.size())
            result.resize(power.size(), 0.0);
        kernels::axpy(c[k], power, result);
    }
    return Pmf(std::move(result));
}

double eval(const Pmf& p, double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("PGF argument outside [0, 1]");
    const auto c = p.coeffs();
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;)
        acc = acc * x + c[k];
    return acc;
}

double factorial_moment(const Pmf& p, std::size_t k)
{
    if (k == 0)
        throw InvalidArgument("factorial moment order must be at least 1");
    const auto c = p.coeffs();
    detail::CompensatedSum s;
    for (std::size_t j = k; j < c.size(); ++j) {
        double falling = 1.0;
        for (std::size_t i = 0; i < k; ++i)
            falling *= static_cast<double>(j - i);
        s += falling * c[j];
    }
    return s.value();
}

FactorialMoments factorial_moments(const Pmf& p, std::size_t k_max)
{
    FactorialMoments out;
    out.m.reserve(k_max);
    for (std::size_t k = 1; k <= k_max; ++k)
        out.m.push_back(factorial_moment(p, k));
    return out;
}

CenteredSeries to_centered(const Pmf& p)
{
    // c_l = sum_{k >= l} p_k C(k, l); all terms nonnegative.
    const auto c = p.coeffs();
    const std::size_t n = c.size();
    std::vector<detail::CompensatedSum> acc(n);
    std::vector<double> row(n, 0.0);
    row[0] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0)
            advance_pascal(row);
        for (std::size_t l = 0; l <= k; ++l)
            acc[l] += c[k] * row[l];
    }
    CenteredSeries out;
    out.coeffs.reserve(n);
    for (const auto& a : acc)
        out.coeffs.push_back(a.value());
    return out;
}

std::vector<double> to_power_basis(const CenteredSeries& c, std::size_t K)
{
    require_truncation(K);
    // a_k = sum_{l >= k} c_l C(l, k) (-1)^{l-k}
    const std::size_t n = c.coeffs.size();
    const std::size_t width = std::min(K, n);
    std::vector<detail::CompensatedSum> acc(width);
    std::vector<double> row(width, 0.0);
    row[0] = 1.0;
    for (std::size_t l = 0; l < n; ++l) {
        if (l > 0)
            advance_pascal(row);
        const double cl = c.coeffs[l];
        if (cl == 0.0)
            continue;
        const std::size_t top = std::min(width, l + 1);
        for (std::size_t k = 0; k < top; ++k) {
            const double term = cl * row[k];
            acc[k] += ((l - k) % 2 == 0) ? term : -term;
        }
    }
    std::vector<double> out(width);
    for (std::size_t k = 0; k < width; ++k)
        out[k] = acc[k].value();
    for (double v : out)
        if (!std::isfinite(v))
            throw NumericError("binomial transform overflowed");
    return out;
}

Pmf from_centered(const CenteredSeries& c, std::size_t K)
{
    return pmf_from_series(to_power_basis(c, K), "centered series");
}

std::vector<double> exp_power_series(std::span<const double> a, std::size_t K)
{
    require_truncation(K);
    std::vector<double> weighted(K, 0.0); // k a_k
    for (std::size_t k = 1; k < std::min(K, a.size()); ++k)
        weighted[k] = static_cast<double>(k) * a[k];

    std::vector<double> b(K, 0.0);
    std::vector<double> reversed(K, 0.0); // reversed[K-1-i] = b_i
    b[0] = std::exp(a.empty() ? 0.0 : a[0]);
    reversed[K - 1] = b[0];
    const std::span<const double> w(weighted);
    const std::span<const double> rb(reversed);
    for (std::size_t n = 1; n < K; ++n) {
        b[n] = kernels::dot(w.subspan(1, n), rb.subspan(K - n, n)) / static_cast<double>(n);
        reversed[K - 1 - n] = b[n];
    }
    return b;
}

Pmf pmf_from_series(std::vector<double> coeffs, const char* what)
{
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double v = coeffs[k];
        if (!std::isfinite(v))
            throw NumericError(std::string(what) + ": coefficient " + std::to_string(k) + " is not finite");
        if (v < -negative_clamp_tol)
            throw NotADistribution(std::string(what) + ": coefficient " + std::to_string(k) + " = " +
                                   std::to_string(v) + " is negative; not a distribution");
    }
    double total = 0.0;
    for (double v : coeffs)
        total += std::max(v, 0.0);
    if (total > 1.0 + 1e-9)
        throw NotADistribution(std::string(what) + ": coefficients sum to " + std::to_string(total) + " > 1");
    if (total > 1.0) {
        for (double& v : coeffs)
            v /= total;
    }
    return Pmf(std::move(coeffs));
}

Pmf exp_centered(const CenteredSeries& c, std::size_t K)
{
    require_truncation(K);
    if (!c.coeffs.empty() && std::fabs(c.coeffs[0]) > 1e-14)
        throw InvalidArgument("centered exponent must vanish at x = 1 (c_0 = 0)");
    for (double v : c.coeffs)
        if (!std::isfinite(v))
            throw InvalidArgument("centered series has a non-finite coefficient");
    if (c.coeffs.size() <= 1)
        return Pmf::delta(0);
    const auto a = to_power_basis(c, K);
    return pmf_from_series(exp_power_series(a, K), "exp of centered series");
}

} // namespace gwi
