#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace tcond::detail {

// Shortest decimal form that round-trips through a double; non-finite values
// get fixed spellings so CSV consumers see stable tokens.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace tcond::detail
