#pragma once

#include <cstdio>
#include <string>

namespace annkin {

/// 9-significant-digit rendering shared by all CSV and text emitters.
inline std::string fmt_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace annkin
