#pragma once

#include <charconv>
#include <string>

namespace fqmsim {

/// Shortest decimal form that parses back to the same binary64 value.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace fqmsim
