#pragma once

#include <cstdio>
#include <string>

namespace weldcrack {

/// printf "%.*g" with a fixed precision; locale-independent ('.' decimal).
inline std::string format_sig(double v, int significant_digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
    return buf;
}

/// Round-trip-exact rendering for persisted model state.
inline std::string format_full(double v) { return format_sig(v, 17); }

}  // namespace weldcrack
