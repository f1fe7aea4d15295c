#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace alpi {

/// Shortest round-trip decimal form of a double. Used by every CSV/JSON
/// writer so that identical runs produce identical bytes.
inline std::string num_to_string(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::string num_to_string(std::uint64_t x) { return std::to_string(x); }
inline std::string num_to_string(std::int64_t x) { return std::to_string(x); }
inline std::string num_to_string(int x) { return std::to_string(x); }

} // namespace alpi
