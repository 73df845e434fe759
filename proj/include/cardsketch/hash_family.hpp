#pragma once

#include <cstdint>
#include <vector>

#include "cardsketch/nat.hpp"

namespace cardsketch {

// Carter-Wegman hash: a polynomial of degree < k over GF(2^d), output
// truncated to the low out_bits bits. Domain [n] embeds into [2^d].
struct KWiseHash {
    unsigned k = 0;
    unsigned d = 0;
    unsigned out_bits = 0;              // c <= d
    std::vector<std::uint64_t> coeffs;  // coeffs[i] multiplies x^i
};

// Level hash: full-width Carter-Wegman evaluation followed by a
// trailing-zero count, so P(value >= j) = 2^-j exactly over the seed
// space. Range is [d+1]; the all-zero evaluation maps to level d.
struct GeometricHash {
    unsigned k = 0;  // 2 throughout this algorithm
    unsigned d = 0;
    std::vector<std::uint64_t> coeffs;
};

std::uint64_t kwise_eval(const KWiseHash& h, std::uint64_t x);
unsigned geom_eval(const GeometricHash& g, std::uint64_t x);

// Family descriptors, used to enumerate or index seed spaces.
struct KWiseFamily {
    unsigned k = 0;
    unsigned d = 0;
    unsigned out_bits = 0;
};

struct GeometricFamily {
    unsigned k = 0;
    unsigned d = 0;
};

inline std::size_t seed_bits(const KWiseFamily& f) {
    return static_cast<std::size_t>(f.k) * f.d;
}
inline std::size_t seed_bits(const GeometricFamily& f) {
    return static_cast<std::size_t>(f.k) * f.d;
}

// Bijection between [2^(k*d)] and seeds: coefficient i is bit slice
// [i*d, (i+1)*d) of the index. Index 0 is the all-zero polynomial.
KWiseHash seed_from_index(const KWiseFamily& f, const Nat& idx);
GeometricHash seed_from_index(const GeometricFamily& f, const Nat& idx);
Nat index_of_seed(const KWiseHash& h);
Nat index_of_seed(const GeometricHash& g);

}  // namespace cardsketch
