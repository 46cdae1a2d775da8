#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <string>

#include "mdi/error.hpp"

namespace mdi {

// 64-bit float <-> 16 hex digits of its IEEE-754 bit pattern (bit-exact).
inline std::string encode_hex_double(double v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
    return buf;
}

inline double decode_hex_double(const std::string& s) {
    if (s.size() != 16) throw ParseError("hex double must have 16 digits: '" + s + "'", 0);
    std::uint64_t bits = 0;
    for (char c : s) {
        bits <<= 4;
        if (c >= '0' && c <= '9')
            bits |= static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f')
            bits |= static_cast<std::uint64_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F')
            bits |= static_cast<std::uint64_t>(c - 'A' + 10);
        else
            throw ParseError("bad hex digit in '" + s + "'", 0);
    }
    return std::bit_cast<double>(bits);
}

}  // namespace mdi
