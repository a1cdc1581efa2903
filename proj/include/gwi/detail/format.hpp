#pragma once

#include <cstdio>
#include <string>

namespace gwi::detail {

// 17 significant digits: round-trips every double.
inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace gwi::detail
