#include <doctest.h>

#include <map>
#include <random>

#include "cardsketch/hash_family.hpp"

using namespace cardsketch;

TEST_CASE("constant polynomial seeds reduce modulo the output range") {
    KWiseHash h{2, 4, 2, {0b1101, 0}};
    for (std::uint64_t x = 0; x < 16; ++x) CHECK(kwise_eval(h, x) == (0b1101 & 0b11));

    // full-width output: plain polynomial evaluation
    KWiseHash full{2, 4, 4, {0b1101, 0}};
    for (std::uint64_t x = 0; x < 16; ++x) CHECK(kwise_eval(full, x) == 0b1101);

    CHECK_THROWS_AS(kwise_eval(h, 16), std::invalid_argument);
}

TEST_CASE("pairwise independence of the degree-<2 family, exhaustively at d=3") {
    for (unsigned out_bits : {2u, 3u}) {
        const KWiseFamily family{2, 3, out_bits};
        const std::uint64_t seeds = std::uint64_t{1} << seed_bits(family);
        CHECK(seeds == 64);
        const std::uint64_t range = 1ull << out_bits;
        for (std::uint64_t x = 0; x < 8; ++x) {
            for (std::uint64_t y = 0; y < 8; ++y) {
                if (x == y) continue;
                std::map<std::pair<std::uint64_t, std::uint64_t>, unsigned> counts;
                for (std::uint64_t s = 0; s < seeds; ++s) {
                    KWiseHash h = seed_from_index(family, Nat(s));
                    counts[{kwise_eval(h, x), kwise_eval(h, y)}]++;
                }
                CHECK(counts.size() == range * range);
                for (const auto& [pair, cnt] : counts)
                    CHECK(cnt == seeds / (range * range));
            }
        }
    }
}

TEST_CASE("trailing-zero levels of crafted evaluations") {
    // constant polynomials pin the evaluation value exactly
    GeometricHash g{2, 4, {0b1100, 0}};
    CHECK(geom_eval(g, 7) == 2);
    GeometricHash odd{2, 4, {0b0101, 0}};
    CHECK(geom_eval(odd, 3) == 0);
    GeometricHash zero{2, 4, {0, 0}};
    CHECK(geom_eval(zero, 1) == 4);  // all-zero evaluation maps to level d
    CHECK_THROWS_AS(geom_eval(g, 16), std::invalid_argument);
}

TEST_CASE("geometric tail is exactly 2^-j over the full seed space at d=4") {
    const GeometricFamily family{2, 4};
    const std::uint64_t seeds = std::uint64_t{1} << seed_bits(family);
    CHECK(seeds == 256);
    for (std::uint64_t x : {0ull, 1ull, 7ull, 15ull}) {
        std::vector<std::uint64_t> at_least(6, 0);
        for (std::uint64_t s = 0; s < seeds; ++s) {
            GeometricHash g = seed_from_index(family, Nat(s));
            unsigned lvl = geom_eval(g, x);
            REQUIRE(lvl <= 4);  // range is [d+1]
            for (unsigned j = 0; j <= lvl; ++j) ++at_least[j];
        }
        for (unsigned j = 0; j <= 4; ++j)
            CHECK(at_least[j] == seeds >> j);
    }
}

TEST_CASE("seed indexing is a bijection") {
    const KWiseFamily family{3, 5, 4};
    KWiseHash zero = seed_from_index(family, Nat(0));
    for (std::uint64_t c : zero.coeffs) CHECK(c == 0);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const Nat idx = Nat(rng() % (1ull << 15));
        KWiseHash h = seed_from_index(family, idx);
        CHECK(index_of_seed(h) == idx);
    }
    const GeometricFamily gf{2, 6};
    for (int i = 0; i < 1000; ++i) {
        const Nat idx = Nat(rng() % (1ull << 12));
        CHECK(index_of_seed(seed_from_index(gf, idx)) == idx);
    }
    CHECK_THROWS_AS(seed_from_index(family, Nat(1) << 15), std::invalid_argument);

    // |H_2([2^3],[2^2])| = 2^6
    CHECK(seed_bits(KWiseFamily{2, 3, 2}) == 6);
}

TEST_CASE("coefficient blocks slice little-endian from the index") {
    const KWiseFamily family{2, 4, 4};
    KWiseHash h = seed_from_index(family, Nat(0xA3));
    CHECK(h.coeffs[0] == 0x3);  // low d bits
    CHECK(h.coeffs[1] == 0xA);
}
