#pragma once

#include <cmath>

namespace gwi::detail {

// Neumaier compensated accumulator.
class CompensatedSum {
public:
    CompensatedSum& operator+=(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace gwi::detail
