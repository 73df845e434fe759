#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#if defined(CARDSKETCH_HAVE_PCLMUL)
#include <immintrin.h>
#endif

namespace cardsketch::gf2 {

// Supported field degrees: 1 <= d <= 64. Universe sizes and pre-bin domains
// of every accepted parameter set fit in 64 bits; larger degrees are
// rejected at parameter-derivation time.
inline constexpr unsigned kMaxDegree = 64;

// Low part of the fixed reduction polynomial x^d + low for GF(2^d).
// For each degree this is the lexicographically least irreducible
// polynomial (tabulated; verified exhaustively in the test suite).
std::uint64_t reduction_low(unsigned d);

// Raw element ops. Values are coefficient vectors packed into uint64_t,
// bit i = coefficient of x^i; callers guarantee bits < 2^d.
inline std::uint64_t add_raw(std::uint64_t a, std::uint64_t b) { return a ^ b; }

#if defined(CARDSKETCH_HAVE_PCLMUL)
inline unsigned __int128 clmul64(std::uint64_t a, std::uint64_t b) {
    __m128i va = _mm_set_epi64x(0, static_cast<long long>(a));
    __m128i vb = _mm_set_epi64x(0, static_cast<long long>(b));
    __m128i p = _mm_clmulepi64_si128(va, vb, 0x00);
    unsigned __int128 lo = static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
    unsigned __int128 hi =
        static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_unpackhi_epi64(p, p)));
    return (hi << 64) | lo;
}
#else
inline unsigned __int128 clmul64(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 r = 0;
    unsigned __int128 aa = a;
    while (b) {
        r ^= aa * (b & 1);  // b&1 in {0,1}: times is a masked xor-in
        aa <<= 1;
        b >>= 1;
    }
    return r;
}
#endif

// Product reduced by x^d + low. The product has degree <= 2d-2; folding the
// part above d back down via x^d == low terminates because low has small
// degree for every tabulated polynomial.
inline std::uint64_t reduce(unsigned __int128 p, unsigned d, std::uint64_t low) {
    if (d == 64) {
        while (std::uint64_t hi = static_cast<std::uint64_t>(p >> 64)) {
            p = static_cast<std::uint64_t>(p) ^ clmul64(hi, low);
        }
        return static_cast<std::uint64_t>(p);
    }
    const std::uint64_t mask = (std::uint64_t{1} << d) - 1;
    while (std::uint64_t hi = static_cast<std::uint64_t>(p >> d)) {
        p = (p & mask) ^ clmul64(hi, low);
    }
    return static_cast<std::uint64_t>(p);
}

inline std::uint64_t mul_raw(std::uint64_t a, std::uint64_t b, unsigned d,
                             std::uint64_t low) {
    return reduce(clmul64(a, b), d, low);
}

inline std::uint64_t mul_raw(std::uint64_t a, std::uint64_t b, unsigned d) {
    return mul_raw(a, b, d, reduction_low(d));
}

// Horner evaluation of sum coeffs[i] * x^i; empty list yields 0.
std::uint64_t eval_poly_raw(std::span<const std::uint64_t> coeffs, std::uint64_t x,
                            unsigned d);

// Checked value type. d is carried alongside so mismatched operands are a
// usage error instead of silent garbage.
struct FieldElem {
    std::uint64_t bits = 0;
    unsigned d = 1;
};

FieldElem add(FieldElem a, FieldElem b);
FieldElem mul(FieldElem a, FieldElem b);
FieldElem eval_poly(std::span<const FieldElem> coeffs, FieldElem x);

}  // namespace cardsketch::gf2
