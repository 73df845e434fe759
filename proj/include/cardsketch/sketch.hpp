#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cardsketch/entropy.hpp"
#include "cardsketch/expander.hpp"
#include "cardsketch/hash_family.hpp"
#include "cardsketch/params.hpp"

namespace cardsketch {

// One row's hash functions: geometric level hash f, pairwise collision
// avoidance g into [c7*b^2], and k-wise bin hash h into [b].
struct HashTriple {
    GeometricHash f;
    KWiseHash g;
    KWiseHash h;
};

GeometricFamily level_family(const Params& p);
KWiseFamily collision_family(const Params& p);
KWiseFamily bin_family(const Params& p);

// ld of the triple seed space: 2*domain_bits + 2*g_bits + k*pre_bin_bits.
std::size_t psi_bits(const Params& p);
Nat psi_size(const Params& p);

// Bijection between [|Psi|] and triples; the f index occupies the most
// significant block, then g, then h.
HashTriple triple_from_index(const Params& p, const Nat& idx);
Nat index_of_triple(const Params& p, const HashTriple& t);

// Flat per-row evaluator for the hot path.
struct RowHasher {
    std::uint64_t f0, f1, g0, g1;
    unsigned fd, gd, hd;
    std::uint64_t fred, gred, hred;
    std::uint64_t pre_mask, bin_mask;
    std::vector<std::uint64_t> h;

    unsigned level(std::uint64_t x) const;
    std::uint32_t bin(std::uint64_t x) const;
};

RowHasher make_row_hasher(const HashTriple& t, const Params& p);

// Evaluates a block of rows per element with the Horner chains interleaved,
// which keeps the carry-less multiplier busy across the independent rows.
// Used by bulk ingestion; results match RowHasher exactly.
class RowBlockHasher {
public:
    RowBlockHasher(std::span<const RowHasher> rows, const Params& p);

    unsigned rows() const { return nrows_; }
    // bins and levels must hold rows() entries
    void eval(std::uint64_t x, std::uint32_t* bins, std::uint8_t* levels) const;

private:
    unsigned nrows_ = 0;
    unsigned k_ = 0;
    unsigned fd_ = 0, gd_ = 0, hd_ = 0;
    std::uint64_t fred_ = 0, gred_ = 0, hred_ = 0;
    std::uint64_t pre_mask_ = 0, bin_mask_ = 0;
    std::vector<std::uint64_t> f0_, f1_, g0_, g1_;
    std::vector<std::uint64_t> hc_;  // coefficient-major: hc_[j * nrows_ + r]
    mutable std::vector<std::uint64_t> acc_, z_;
};

// Seed of the inner algorithm: an expander walk over the triple space,
// one vertex (= one triple) per row.
struct SeedOmega {
    WalkSeed walk;
    std::vector<HashTriple> rows;
    std::vector<RowHasher> hashers;
};

WalkSpace omega_walk_space(const Params& p);
SeedOmega seed_omega_from_walk(const Params& p, WalkSeed walk);

// The only randomized operation in the whole system.
SeedOmega init(const Params& p, BitSource& entropy);

// Sketch state: an l x b table of levels relative to the shared cut-off q.
// -1 marks an empty bin. Entries are plain integers in working memory; the
// Elias-gamma accounting governs the serialized size and the compress
// trigger only.
struct Sketch {
    std::uint32_t rows = 0;  // l
    std::uint32_t bins = 0;  // b
    std::int64_t q = 0;
    std::vector<std::int64_t> table;  // row-major, rows * bins entries

    std::int64_t at(unsigned i, unsigned j) const {
        return table[static_cast<std::size_t>(i) * bins + j];
    }

    bool operator==(const Sketch&) const = default;
};

// All bins empty, q = 0; the merge identity.
Sketch empty_sketch(const Params& p);

// Sum of floor(ld(B[i,j] + 2)): the serialized table budget the compress
// loop keeps below c5_space * b * l.
std::uint64_t table_space_bits(std::span<const std::int64_t> table);

// Discrete derivative of the space reduction per cut-off increment: entry
// x = B[i,j] + 2 contributes increments at x - (2^k - 1) for 1 <= k <= ld x.
// Dense form, for tables whose entries stay below 2^22.
std::vector<std::uint32_t> cutoff_chi(std::span<const std::int64_t> table);

// Smallest decrement delta such that lowering every entry by delta (clamped
// at -1) meets the space budget: the shortest prefix of the chi sequence
// whose sum covers the excess. Works for arbitrarily large entries (the
// increment positions are kept sparse instead of materializing chi).
std::int64_t find_required_cutoff(std::span<const std::int64_t> table, const Params& p);

Sketch compress(Sketch s, const Params& p);
Sketch single(std::uint64_t x, const SeedOmega& seed, const Params& p);
Sketch merge(const Sketch& a, const Sketch& b, const Params& p);

struct RowEstimate {
    double y = 0;
    bool saturated = false;  // every bin at/above the threshold; p clamped to b-1
};

std::vector<RowEstimate> row_estimates(const Sketch& s, const Params& p);

// Median of the per-row estimates (lower median for even row counts).
double estimate(const Sketch& s, const Params& p);

// Lower median: index floor((count-1)/2) of the sorted values.
double lower_median(std::vector<double> values);

// Expected number of bins hit when r balls land uniformly in b bins, and the
// estimate-step inversion of it (evaluated via logs, as in the estimator).
double rho(double r, double b);
double rho_inverse(double hit_bins, double b);

// Reference construction of the sketch for an element set: per-bin maxima
// of the level hash, with the smallest cut-off meeting the space budget
// found by a direct linear scan (kept independent of find_required_cutoff).
// Any sequence of single/merge calls over a set yields exactly this state.
Sketch tau_oracle(const SeedOmega& seed, std::span<const std::uint64_t> elements,
                  const Params& p);

}  // namespace cardsketch
