#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace trotter_shuffle::csv {

/// Shortest decimal string that round-trips to the same double.
inline std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string num(std::uint64_t v) { return std::to_string(v); }
inline std::string num(std::int64_t v) { return std::to_string(v); }
inline std::string num(unsigned v) { return std::to_string(v); }
inline std::string num(int v) { return std::to_string(v); }
inline std::string num(unsigned long long v) { return std::to_string(v); }

} // namespace trotter_shuffle::csv
