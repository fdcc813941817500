#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace mlutd::detail {

/// Shortest round-trip decimal form; "nan" for NaN.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

}  // namespace mlutd::detail
