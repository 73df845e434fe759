#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cardsketch {

// Arbitrary-precision natural number. Walk spaces over hash-seed sets have
// sizes far beyond 64 bits, so vertex indices are unbounded.
using Nat = boost::multiprecision::cpp_int;

inline std::size_t bit_length(const Nat& v) {
    if (v == 0) return 0;
    return static_cast<std::size_t>(boost::multiprecision::msb(v)) + 1;
}

// Number of bits needed to index [n], i.e. ceil(log2(n)) for n >= 1.
inline std::size_t index_bits(const Nat& n) {
    if (n <= 1) return 0;
    Nat top = n - 1;
    return bit_length(top);
}

inline bool is_power_of_two(const Nat& v) {
    if (v <= 0) return false;
    return (v & (v - 1)) == 0;
}

// Big-endian byte serialization (no leading zero bytes; 0 encodes as empty).
inline std::vector<std::uint8_t> nat_to_bytes_be(const Nat& v) {
    std::vector<std::uint8_t> out;
    if (v != 0) boost::multiprecision::export_bits(v, std::back_inserter(out), 8);
    return out;
}

inline Nat nat_from_bytes_be(const std::uint8_t* data, std::size_t len) {
    Nat v = 0;
    if (len > 0) boost::multiprecision::import_bits(v, data, data + len, 8);
    return v;
}

}  // namespace cardsketch
