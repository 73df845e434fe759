#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "cardsketch/sketch.hpp"

namespace test_support {

using namespace cardsketch;

inline std::vector<std::uint64_t> random_set(std::mt19937_64& rng, std::uint64_t n,
                                             std::size_t count) {
    std::set<std::uint64_t> s;
    while (s.size() < count) s.insert(rng() % n);
    return {s.begin(), s.end()};
}

// Reference compress: repeatedly decrement and raise the cut-off until the
// budget is met. Kept independent of find_required_cutoff.
inline std::int64_t naive_cutoff(std::vector<std::int64_t> table, const Params& p) {
    const std::uint64_t budget =
        static_cast<std::uint64_t>(p.consts.c5_space) * p.b * p.l;
    std::int64_t q = 0;
    while (table_space_bits(table) > budget) {
        ++q;
        for (auto& v : table) v = std::max<std::int64_t>(v - 1, -1);
    }
    return q;
}

inline Sketch sequential_fold(const SeedOmega& seed,
                              const std::vector<std::uint64_t>& elems, const Params& p) {
    Sketch acc = single(elems[0], seed, p);
    for (std::size_t i = 1; i < elems.size(); ++i)
        acc = merge(acc, single(elems[i], seed, p), p);
    return acc;
}

// Random binary merge tree over a random partition of the elements;
// with_duplicates shares some elements between parts (unions make that
// legal).
inline Sketch random_tree_merge(const SeedOmega& seed,
                                const std::vector<std::uint64_t>& elems, const Params& p,
                                std::mt19937_64& rng, bool with_duplicates) {
    const std::size_t parts = 1 + rng() % std::min<std::size_t>(elems.size(), 8);
    std::vector<std::vector<std::uint64_t>> split(parts);
    for (std::size_t i = 0; i < elems.size(); ++i) {
        split[rng() % parts].push_back(elems[i]);
        if (with_duplicates && rng() % 4 == 0)
            split[rng() % parts].push_back(elems[i]);
    }
    // every part must see at least one element; top up empties
    for (auto& part : split)
        if (part.empty()) part.push_back(elems[rng() % elems.size()]);

    std::vector<Sketch> pool;
    pool.reserve(parts);
    for (const auto& part : split) pool.push_back(sequential_fold(seed, part, p));
    while (pool.size() > 1) {
        const std::size_t i = rng() % pool.size();
        std::size_t j = rng() % pool.size();
        if (i == j) continue;
        Sketch merged = merge(pool[i], pool[j], p);
        pool[std::min(i, j)] = std::move(merged);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
    }
    return pool[0];
}

}  // namespace test_support
