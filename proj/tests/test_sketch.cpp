#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "cardsketch/sketch.hpp"
#include "test_support.hpp"

using namespace cardsketch;

namespace {

const Params& small_params() {
    static Params p = derive_params(1ull << 16, 0.25, 0.3, Profile::practical);
    return p;
}

const Params& fast_params() {
    static Params p = derive_params(1ull << 10, 0.9, 0.9, Profile::practical);
    return p;
}

SeedOmega make_seed(const Params& p, std::uint64_t entropy) {
    Mt19937BitSource src(entropy);
    return init(p, src);
}

}  // namespace

TEST_CASE("triple index layout and bijection") {
    const Params& p = small_params();
    CHECK(psi_bits(p) == 2 * p.domain_bits + 2 * p.g_bits +
                             static_cast<std::size_t>(p.k) * p.pre_bin_bits);

    HashTriple zero = triple_from_index(p, Nat(0));
    for (auto c : zero.f.coeffs) CHECK(c == 0);
    for (auto c : zero.g.coeffs) CHECK(c == 0);
    for (auto c : zero.h.coeffs) CHECK(c == 0);

    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
        Nat idx = 0;
        for (std::size_t bits = psi_bits(p); bits > 0;) {
            const unsigned chunk = bits >= 64 ? 64 : static_cast<unsigned>(bits);
            idx <<= chunk;
            idx |= rng() >> (64 - chunk);
            bits -= chunk;
        }
        CHECK(index_of_triple(p, triple_from_index(p, idx)) == idx);
    }
    CHECK_THROWS_AS(triple_from_index(p, psi_size(p)), std::invalid_argument);
}

TEST_CASE("init determinism and structure") {
    const Params& p = fast_params();
    SeedOmega a = make_seed(p, 7);
    SeedOmega b = make_seed(p, 7);
    CHECK(a.walk == b.walk);
    REQUIRE(a.rows.size() == p.l);
    for (unsigned i = 0; i < p.l; ++i) {
        CHECK(a.rows[i].f.coeffs == b.rows[i].f.coeffs);
        CHECK(a.rows[i].h.coeffs == b.rows[i].h.coeffs);
        // row triples decode from the walk vertices
        CHECK(a.rows[i].f.d == p.domain_bits);
        CHECK(a.rows[i].g.out_bits == p.pre_bin_bits);
        CHECK(a.rows[i].h.out_bits == p.bin_bits);
    }
    SeedOmega c = make_seed(p, 8);
    CHECK(a.walk != c.walk);
}

TEST_CASE("row-0 triple indices look uniform on a reduced space") {
    const Params& p = fast_params();
    const unsigned cells = 16;
    std::vector<std::uint64_t> counts(cells, 0);
    const unsigned draws = 4096;
    for (unsigned i = 0; i < draws; ++i) {
        SeedOmega s = make_seed(p, 1000 + i);
        const Nat idx = index_of_triple(p, s.rows[0]);
        counts[static_cast<unsigned>(idx & 0xF)]++;
    }
    const double expected = static_cast<double>(draws) / cells;
    double chi2 = 0;
    for (std::uint64_t c : counts) {
        const double diff = static_cast<double>(c) - expected;
        chi2 += diff * diff / expected;
    }
    // Wilson-Hilferty critical value, df = 15, alpha = 0.001
    CHECK(chi2 < 37.8);
}

TEST_CASE("single: one level per row, no cut-off at practical scale") {
    const Params& p = small_params();
    SeedOmega seed = make_seed(p, 21);
    Sketch s = single(12345, seed, p);
    CHECK(s.q == 0);  // l * floor(ld(d+2)) is far under the budget
    unsigned nonempty = 0;
    for (auto v : s.table) nonempty += (v != -1);
    CHECK(nonempty == p.l);
    CHECK_THROWS_AS(single(p.n, seed, p), std::invalid_argument);
}

TEST_CASE("single equals the reference construction on singletons") {
    const Params& p = small_params();
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        SeedOmega seed = make_seed(p, 5000 + i);
        const std::uint64_t x = rng() % p.n;
        const std::uint64_t xs[] = {x};
        CHECK(single(x, seed, p) == tau_oracle(seed, xs, p));
    }
}

TEST_CASE("merge laws on reachable states") {
    const Params& p = small_params();
    SeedOmega seed = make_seed(p, 3);
    std::mt19937_64 rng(31);

    for (int trial = 0; trial < 20; ++trial) {
        auto a_elems = test_support::random_set(rng, p.n, 1 + rng() % 200);
        auto b_elems = test_support::random_set(rng, p.n, 1 + rng() % 200);
        Sketch sa = tau_oracle(seed, a_elems, p);
        Sketch sb = tau_oracle(seed, b_elems, p);

        CHECK(merge(sa, sa, p) == sa);           // idempotent
        CHECK(merge(sa, sb, p) == merge(sb, sa, p));  // commutative

        // union equality: merge(tau(A), tau(B)) = tau(A u B)
        std::vector<std::uint64_t> u = a_elems;
        u.insert(u.end(), b_elems.begin(), b_elems.end());
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        CHECK(merge(sa, sb, p) == tau_oracle(seed, u, p));
    }

    // three-way associativity, bit-identical state
    auto a = test_support::random_set(rng, p.n, 50);
    auto b = test_support::random_set(rng, p.n, 50);
    auto c = test_support::random_set(rng, p.n, 50);
    Sketch sa = tau_oracle(seed, a, p);
    Sketch sb = tau_oracle(seed, b, p);
    Sketch sc = tau_oracle(seed, c, p);
    CHECK(merge(merge(sa, sb, p), sc, p) == merge(sa, merge(sb, sc, p), p));

    Sketch wrong = sa;
    wrong.bins /= 2;
    CHECK_THROWS_AS(merge(sa, wrong, p), std::invalid_argument);
}

TEST_CASE("the empty sketch is the merge identity") {
    const Params& p = small_params();
    SeedOmega seed = make_seed(p, 4);
    Sketch e = empty_sketch(p);
    CHECK(table_space_bits(e.table) == 0);
    std::mt19937_64 rng(5);
    auto elems = test_support::random_set(rng, p.n, 100);
    Sketch s = tau_oracle(seed, elems, p);
    CHECK(merge(e, s, p) == s);
    CHECK(merge(s, e, p) == s);
    CHECK(merge(e, e, p) == e);
}

TEST_CASE("history independence over random merge trees") {
    const Params& p = small_params();
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        SeedOmega seed = make_seed(p, 900 + trial);
        auto elems = test_support::random_set(rng, p.n, 2 + rng() % 300);
        Sketch expect = tau_oracle(seed, elems, p);
        Sketch folded = test_support::sequential_fold(seed, elems, p);
        Sketch tree = test_support::random_tree_merge(seed, elems, p, rng, true);
        CHECK(folded == expect);
        CHECK(tree == expect);
    }
}

TEST_CASE("monotonicity: levels and cut-off never decrease as sets grow") {
    const Params& p = small_params();
    SeedOmega seed = make_seed(p, 6);
    std::mt19937_64 rng(13);
    auto base = test_support::random_set(rng, p.n, 100);
    auto extra = test_support::random_set(rng, p.n, 100);
    std::vector<std::uint64_t> bigger = base;
    bigger.insert(bigger.end(), extra.begin(), extra.end());
    std::sort(bigger.begin(), bigger.end());
    bigger.erase(std::unique(bigger.begin(), bigger.end()), bigger.end());

    Sketch s1 = tau_oracle(seed, base, p);
    Sketch s2 = tau_oracle(seed, bigger, p);
    CHECK(s2.q >= s1.q);
    for (std::size_t i = 0; i < s1.table.size(); ++i)
        CHECK(s2.table[i] + s2.q >= s1.table[i] + s1.q);
}

TEST_CASE("space budget holds after every public operation") {
    const Params& p = small_params();
    const std::uint64_t budget = std::uint64_t{p.consts.c5_space} * p.b * p.l;
    SeedOmega seed = make_seed(p, 8);
    std::mt19937_64 rng(17);
    Sketch acc = empty_sketch(p);
    for (int i = 0; i < 50; ++i) {
        Sketch s = single(rng() % p.n, seed, p);
        CHECK(table_space_bits(s.table) <= budget);
        acc = merge(acc, s, p);
        CHECK(table_space_bits(acc.table) <= budget);
        CHECK(acc.q <= static_cast<std::int64_t>(p.domain_bits));
    }
}

TEST_CASE("compress: worked chi example and fixed points") {
    const Params& p = small_params();

    std::vector<std::int64_t> one_entry{23};
    auto chi = cutoff_chi(one_entry);
    std::vector<unsigned> expect_positions{10, 18, 22, 24};
    for (std::size_t pos = 0; pos < chi.size(); ++pos) {
        const bool should =
            std::find(expect_positions.begin(), expect_positions.end(), pos) !=
            expect_positions.end();
        CHECK(chi[pos] == (should ? 1u : 0u));
    }

    // already under budget: unchanged
    SeedOmega seed = make_seed(p, 10);
    std::mt19937_64 rng(23);
    auto elems = test_support::random_set(rng, p.n, 200);
    Sketch s = tau_oracle(seed, elems, p);
    CHECK(compress(s, p) == s);
    Sketch e = empty_sketch(p);
    CHECK(compress(e, p) == e);
}

TEST_CASE("fast cut-off equals the naive decrement loop on over-budget tables") {
    // the budget never binds for realistic levels, so synthetic tables with
    // huge entries drive the equivalence check
    const Params& p = fast_params();
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::int64_t> table(static_cast<std::size_t>(p.l) * p.b);
        for (auto& v : table) {
            switch (rng() % 4) {
                case 0: v = -1; break;
                case 1: v = static_cast<std::int64_t>(rng() % 64); break;
                case 2: v = static_cast<std::int64_t>(rng() % (1ull << 20)); break;
                default: v = static_cast<std::int64_t>(rng() % (1ull << 50)); break;
            }
        }
        const std::int64_t fast = find_required_cutoff(table, p);
        const std::int64_t naive = test_support::naive_cutoff(table, p);
        CHECK(fast == naive);
    }

    // dense chi agrees with the sparse path on small tables
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::int64_t> table(static_cast<std::size_t>(p.l) * p.b);
        for (auto& v : table) v = static_cast<std::int64_t>(rng() % (1ull << 14)) - 1;
        auto chi = cutoff_chi(table);
        std::uint64_t total = 0;
        for (auto c : chi) total += c;
        CHECK(total == table_space_bits(table));
    }
}

TEST_CASE("estimator: empty, singleton, and saturation handling") {
    const Params& p = small_params();  // b = 1024 >= 512
    SeedOmega seed = make_seed(p, 30);

    CHECK(estimate(empty_sketch(p), p) == 0.0);

    // singleton rows with level <= ld b - 9 report exactly one bin
    Sketch s1 = single(99, seed, p);
    CHECK(estimate(s1, p) >= 1.0);

    // saturated row: all bins at the threshold
    Sketch sat = empty_sketch(p);
    for (auto& v : sat.table) v = 0;
    auto rows = row_estimates(sat, p);
    for (const auto& r : rows) {
        CHECK(r.saturated);
        CHECK(std::isfinite(r.y));
    }
}

TEST_CASE("rho inversion is exact on the curve") {
    const double b = 8192.0;
    for (double r : {0.0, 1.0, 17.0, 100.0, 1000.0, 0.5 * b, 0.9 * b}) {
        const double p = rho(r, b);
        CHECK(std::abs(rho_inverse(p, b) - r) <= 1e-9);
    }
    CHECK(rho_inverse(1.0, b) == 1.0);  // exact singleton inversion
}

TEST_CASE("lower median of an even count") {
    CHECK(lower_median({4.0, 1.0, 3.0, 2.0}) == 2.0);
    CHECK(lower_median({5.0, 1.0, 3.0}) == 3.0);
    CHECK(lower_median({7.0}) == 7.0);
    CHECK_THROWS_AS(lower_median({}), std::invalid_argument);
}

TEST_CASE("tau oracle rejects empty sets and cut-off grows with the set") {
    const Params& p = small_params();
    SeedOmega seed = make_seed(p, 40);
    CHECK_THROWS_AS(tau_oracle(seed, {}, p), std::invalid_argument);

    std::mt19937_64 rng(41);
    for (int i = 0; i < 10; ++i) {
        auto a = test_support::random_set(rng, p.n, 50 + rng() % 100);
        auto b = a;
        auto more = test_support::random_set(rng, p.n, 100);
        b.insert(b.end(), more.begin(), more.end());
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        CHECK(tau_oracle(seed, a, p).q <= tau_oracle(seed, b, p).q);
    }
}

TEST_CASE("cut-off stays below the q_max bound across seeded trials") {
    const Params& p = fast_params();
    std::mt19937_64 rng(55);
    unsigned violations = 0;
    const unsigned trials = 500;
    for (unsigned t = 0; t < trials; ++t) {
        SeedOmega seed = make_seed(p, 4000 + t);
        auto elems = test_support::random_set(rng, p.n, 600);
        Sketch s = tau_oracle(seed, elems, p);
        const double q_max = std::max(
            0.0, std::ceil(std::log2(static_cast<double>(elems.size()))) - p.bin_bits);
        if (static_cast<double>(s.q) > q_max) ++violations;
    }
    // statistical rendering with binomial slack; at these scales the
    // cut-off never moves at all
    const double bound = p.delta / 2 + 3.0 * std::sqrt(p.delta / 2 * (1 - p.delta / 2) / trials);
    CHECK(static_cast<double>(violations) / trials <= bound);
}

TEST_CASE("block evaluator matches the row hashers") {
    const Params& p = small_params();
    SeedOmega seed = make_seed(p, 60);
    RowBlockHasher block(seed.hashers, p);
    std::vector<std::uint32_t> bins(p.l);
    std::vector<std::uint8_t> levels(p.l);
    std::mt19937_64 rng(61);
    for (int i = 0; i < 500; ++i) {
        const std::uint64_t x = rng() % p.n;
        block.eval(x, bins.data(), levels.data());
        for (unsigned r = 0; r < p.l; ++r) {
            CHECK(bins[r] == seed.hashers[r].bin(x));
            CHECK(levels[r] == seed.hashers[r].level(x));
        }
    }
}
