#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace mixlap {

/// Shortest decimal representation that round-trips to the same double.
/// Used for all text output so identical inputs give byte-identical files.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace mixlap
