#pragma once

#include <vector>

#include "cardsketch/sketch.hpp"

namespace cardsketch {

// Seed of the repetition layer: a walk over the inner seed space. Each
// vertex index decodes (mixed-radix) to one inner walk seed. With m = 1 the
// walk is just a uniform start vertex, which is exactly the inner init.
struct SeedTheta {
    WalkSeed walk;
    std::vector<SeedOmega> reps;  // m decoded inner seeds
};

WalkSpace theta_walk_space(const OuterParams& op);
SeedTheta seed_theta_from_walk(const OuterParams& op, WalkSeed walk);
SeedTheta outer_init(const OuterParams& op, BitSource& entropy);

// m inner sketches driven by one seed.
struct VectorSketch {
    std::vector<Sketch> parts;

    bool operator==(const VectorSketch&) const = default;
};

VectorSketch outer_empty(const OuterParams& op);
VectorSketch outer_single(std::uint64_t x, const SeedTheta& seed, const OuterParams& op);
VectorSketch outer_merge(const VectorSketch& a, const VectorSketch& b,
                         const OuterParams& op);

// Lower median of the inner estimates.
double outer_estimate(const VectorSketch& d, const OuterParams& op);

}  // namespace cardsketch
