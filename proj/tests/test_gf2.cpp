#include <doctest.h>

#include <random>
#include <vector>

#include "cardsketch/gf2.hpp"

using namespace cardsketch;
using gf2::FieldElem;

namespace {

// Independent double-and-add multiplier (no carry-less intrinsics), scanning
// the bits of b from the top.
std::uint64_t mul_shift_oracle(std::uint64_t a, std::uint64_t b, unsigned d,
                               std::uint64_t low) {
    std::uint64_t r = 0;
    const std::uint64_t mask = d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
    for (int i = 63; i >= 0; --i) {
        const bool carry = (r >> (d - 1)) & 1;
        r = (r << 1) & mask;
        if (carry) r ^= low;
        if ((b >> i) & 1) r ^= a;
    }
    return r;
}

// Polynomial remainder over GF(2), operands as bit vectors in a u128.
unsigned __int128 poly_mod(unsigned __int128 a, unsigned __int128 b) {
    auto deg = [](unsigned __int128 v) {
        int d = -1;
        while (v) {
            v >>= 1;
            ++d;
        }
        return d;
    };
    const int db = deg(b);
    int da = deg(a);
    while (a != 0 && da >= db) {
        a ^= b << (da - db);
        da = deg(a);
    }
    return a;
}

unsigned __int128 poly_gcd(unsigned __int128 a, unsigned __int128 b) {
    while (b != 0) {
        unsigned __int128 t = poly_mod(a, b);
        a = b;
        b = t;
    }
    return a;
}

// Rabin irreducibility test for x^d + low over GF(2), built on the shift
// oracle so the check shares nothing with the library multiply.
bool is_irreducible(std::uint64_t low, unsigned d) {
    if (d == 1) return true;
    auto sq = [&](std::uint64_t v) { return mul_shift_oracle(v, v, d, low); };
    std::uint64_t t = 2;  // the polynomial x
    for (unsigned i = 0; i < d; ++i) t = sq(t);
    if (t != 2) return false;
    unsigned rest = d;
    for (unsigned p = 2; p <= rest; ++p) {
        if (rest % p != 0) continue;
        while (rest % p == 0) rest /= p;
        std::uint64_t u = 2;
        for (unsigned i = 0; i < d / p; ++i) u = sq(u);
        unsigned __int128 f = (static_cast<unsigned __int128>(1) << d) | low;
        if (poly_gcd(u ^ 2ull, f) != 1) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("field addition is xor with the usual identities") {
    CHECK(gf2::add({0b1011, 4}, {0b0110, 4}).bits == 0b1101);
    for (std::uint64_t x : {0ull, 1ull, 9ull, 15ull}) {
        CHECK(gf2::add({x, 4}, {x, 4}).bits == 0);
        CHECK(gf2::add({x, 4}, {0, 4}).bits == x);
    }
    CHECK_THROWS_AS(gf2::add({1, 4}, {1, 5}), std::invalid_argument);
}

TEST_CASE("multiplication identities and the worked degree-3 product") {
    for (unsigned d : {1u, 3u, 8u, 31u, 64u}) {
        const std::uint64_t x = d == 1 ? 1 : 0b101;
        CHECK(gf2::mul({x, d}, {1, d}).bits == x);
        CHECK(gf2::mul({x, d}, {0, d}).bits == 0);
    }
    // x * x^2 = x^3 = x + 1 mod x^3 + x + 1
    CHECK(gf2::mul({0b010, 3}, {0b100, 3}).bits == 0b011);
    CHECK_THROWS_AS(gf2::mul({1, 3}, {1, 4}), std::invalid_argument);
    CHECK_THROWS_AS(gf2::mul({0b1000, 3}, {1, 3}), std::invalid_argument);
}

TEST_CASE("eval_poly: constants, degree one, and the power-sum oracle") {
    FieldElem c{0b110, 3};
    std::vector<FieldElem> coeffs{c};
    for (std::uint64_t x = 0; x < 8; ++x)
        CHECK(gf2::eval_poly(coeffs, {x, 3}).bits == c.bits);

    std::vector<FieldElem> lin{{0b011, 3}, {0b101, 3}};
    for (std::uint64_t x = 0; x < 8; ++x) {
        auto expect = gf2::add(lin[0], gf2::mul(lin[1], {x, 3}));
        CHECK(gf2::eval_poly(lin, {x, 3}).bits == expect.bits);
    }

    CHECK(gf2::eval_poly(std::span<const FieldElem>{}, {5, 3}).bits == 0);

    // term-by-term power computation as the independent route
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<FieldElem> cs;
        for (int i = 0; i < 5; ++i) cs.push_back({rng() & 7, 3});
        const std::uint64_t x = rng() & 7;
        std::uint64_t expect = 0;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            std::uint64_t pw = 1;
            for (std::size_t j = 0; j < i; ++j) pw = gf2::mul_raw(pw, x, 3);
            expect ^= gf2::mul_raw(cs[i].bits, pw, 3);
        }
        CHECK(gf2::eval_poly(cs, {x, 3}).bits == expect);
    }
}

TEST_CASE("field axioms exhaustively for d <= 4") {
    for (unsigned d = 1; d <= 4; ++d) {
        const std::uint64_t size = 1ull << d;
        for (std::uint64_t a = 0; a < size; ++a) {
            bool has_inverse = a == 0;
            for (std::uint64_t b = 0; b < size; ++b) {
                if (gf2::mul_raw(a, b, d) == 1) has_inverse = true;
                CHECK(gf2::mul_raw(a, b, d) == gf2::mul_raw(b, a, d));
                for (std::uint64_t c = 0; c < size; ++c) {
                    CHECK(gf2::mul_raw(gf2::mul_raw(a, b, d), c, d) ==
                          gf2::mul_raw(a, gf2::mul_raw(b, c, d), d));
                    CHECK(gf2::mul_raw(a, b ^ c, d) ==
                          (gf2::mul_raw(a, b, d) ^ gf2::mul_raw(a, c, d)));
                }
            }
            CHECK(has_inverse);
        }
    }
}

TEST_CASE("multiply agrees with the shift-and-reduce oracle at d = 64") {
    std::mt19937_64 rng(2024);
    const std::uint64_t low = gf2::reduction_low(64);
    for (int i = 0; i < 10000; ++i) {
        const std::uint64_t a = rng(), b = rng();
        CHECK(gf2::mul_raw(a, b, 64) == mul_shift_oracle(a, b, 64, low));
    }
    for (unsigned d : {17u, 25u, 31u, 32u, 47u}) {
        const std::uint64_t mask = (std::uint64_t{1} << d) - 1;
        const std::uint64_t lo = gf2::reduction_low(d);
        for (int i = 0; i < 2000; ++i) {
            const std::uint64_t a = rng() & mask, b = rng() & mask;
            CHECK(gf2::mul_raw(a, b, d) == mul_shift_oracle(a, b, d, lo));
        }
    }
}

TEST_CASE("reduction polynomials are the lexicographically least irreducibles") {
    for (unsigned d = 1; d <= 64; ++d) {
        const std::uint64_t low = gf2::reduction_low(d);
        CHECK(is_irreducible(low, d));
        if (d >= 2) {
            // anything smaller without a constant term is divisible by x
            for (std::uint64_t cand = 1; cand < low; cand += 2)
                CHECK_FALSE(is_irreducible(cand, d));
        }
    }
    CHECK_THROWS_AS(gf2::reduction_low(0), std::invalid_argument);
    CHECK_THROWS_AS(gf2::reduction_low(65), std::invalid_argument);
}
