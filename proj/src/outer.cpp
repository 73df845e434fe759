#include "cardsketch/outer.hpp"

#include <cmath>
#include <stdexcept>

namespace cardsketch {

WalkSpace theta_walk_space(const OuterParams& op) {
    const Nat omega_size = walk_space_size(omega_walk_space(op.inner));
    return make_walk_space(omega_size, std::log(op.lambda_outer), op.m);
}

SeedTheta seed_theta_from_walk(const OuterParams& op, WalkSeed walk) {
    SeedTheta seed;
    seed.walk = std::move(walk);
    const WalkSpace outer_ws = theta_walk_space(op);
    const WalkSpace inner_ws = omega_walk_space(op.inner);
    std::vector<Nat> vertices = walk_from_seed(outer_ws, seed.walk);
    seed.reps.reserve(vertices.size());
    for (const Nat& v : vertices)
        seed.reps.push_back(
            seed_omega_from_walk(op.inner, walk_seed_from_index(inner_ws, v)));
    return seed;
}

SeedTheta outer_init(const OuterParams& op, BitSource& entropy) {
    return seed_theta_from_walk(op, sample_walk(theta_walk_space(op), entropy));
}

VectorSketch outer_empty(const OuterParams& op) {
    VectorSketch d;
    d.parts.assign(op.m, empty_sketch(op.inner));
    return d;
}

VectorSketch outer_single(std::uint64_t x, const SeedTheta& seed, const OuterParams& op) {
    if (seed.reps.size() != op.m) throw std::invalid_argument("seed/params mismatch");
    VectorSketch d;
    d.parts.reserve(op.m);
    for (unsigned i = 0; i < op.m; ++i)
        d.parts.push_back(single(x, seed.reps[i], op.inner));
    return d;
}

VectorSketch outer_merge(const VectorSketch& a, const VectorSketch& b,
                         const OuterParams& op) {
    if (a.parts.size() != op.m || b.parts.size() != op.m)
        throw std::invalid_argument("vector sketch length mismatch");
    VectorSketch d;
    d.parts.reserve(op.m);
    for (unsigned i = 0; i < op.m; ++i)
        d.parts.push_back(merge(a.parts[i], b.parts[i], op.inner));
    return d;
}

double outer_estimate(const VectorSketch& d, const OuterParams& op) {
    if (d.parts.size() != op.m)
        throw std::invalid_argument("vector sketch length mismatch");
    std::vector<double> ys;
    ys.reserve(d.parts.size());
    for (const Sketch& s : d.parts) ys.push_back(estimate(s, op.inner));
    return lower_median(std::move(ys));
}

}  // namespace cardsketch
