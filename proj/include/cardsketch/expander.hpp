#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cardsketch/entropy.hpp"
#include "cardsketch/nat.hpp"

namespace cardsketch {

inline constexpr unsigned kGraphDegree = 8;

// Spectral bound of the 8-regular torus graph (second eigenvalue <= 5*sqrt(2)).
inline const double kTorusLambda0 = 0.88388347648318447;  // 5*sqrt(2)/8

// 8-regular multigraph on the torus [m] x [m]; strongly explicit, so walks
// never materialize the graph.
struct BaseGraph {
    Nat m;
};

struct TorusPoint {
    Nat x, y;
    bool operator==(const TorusPoint&) const = default;
};

// Neighbor maps, label j: 0:(x+2y,y) 1:(x+2y+1,y) 2:(x-2y,y) 3:(x-2y-1,y)
// 4:(x,y+2x) 5:(x,y+2x+1) 6:(x,y-2x) 7:(x,y-2x-1), all mod m.
// Label j and label j^2 are mutually inverse, so the edge multiset is
// symmetric (the multigraph is undirected).
TorusPoint base_step(const BaseGraph& g, const TorusPoint& v, unsigned label);

// Sample space of walks of a fixed length over a vertex set [N], with the
// spectral target reached by powering the torus graph: one logical step is
// power_t base steps. The powered graph is never materialized.
//
// [N] maps onto the torus via m^2 in {N, 2N}: vertex s lifts to
// (s div m, s mod m) and torus point (x,y) projects to (x*m + y) mod N.
// When m^2 = 2N the projection identifies (x,y) with (x + m/2, y), a graph
// automorphism, so the quotient stays 8-regular with the same spectral
// bound and a uniform stationary distribution.
struct WalkSpace {
    Nat vertex_count;        // N = |S|
    Nat m;                   // torus side
    double ln_lambda_target = 0;
    unsigned power_t = 1;    // base steps per logical step
    unsigned walk_len = 1;   // l

    unsigned seed_bits_per_step() const { return 3 * power_t; }
    std::size_t step_count() const {
        return static_cast<std::size_t>(walk_len - 1) * power_t;
    }
};

// Requires a vertex count with an exact torus adaptation (every power of
// two qualifies, as does every perfect square).
WalkSpace make_walk_space(const Nat& vertex_count, double ln_lambda_target,
                          unsigned walk_len);

// |E(S, lambda, l)| = |S| * 8^(power_t * (l-1)).
Nat walk_space_size(const WalkSpace& ws);

// A walk seed: start vertex plus one 3-bit label per base step. Decodes to
// exactly one vertex sequence.
struct WalkSeed {
    Nat start;                       // < vertex_count
    std::vector<std::uint8_t> steps; // step_count() labels, each < 8

    bool operator==(const WalkSeed&) const = default;
};

// The l visited vertices as indices in [N].
std::vector<Nat> walk_from_seed(const WalkSpace& ws, const WalkSeed& seed);

// Uniform walk: start by rejection sampling on index_bits(N)-bit draws
// (no rejection when N is a power of two), then uniform labels.
WalkSeed sample_walk(const WalkSpace& ws, BitSource& entropy);

// Mixed-radix bijection between seeds and [|E(S, lambda, l)|]: the start
// index followed by the base-8 label digits in walk order.
Nat walk_seed_to_index(const WalkSpace& ws, const WalkSeed& seed);
WalkSeed walk_seed_from_index(const WalkSpace& ws, const Nat& index);

// ---- test-scale spectral tools ----

// Dense adjacency with edge multiplicities, for graphs small enough to
// materialize (vertex count <= 10^4).
struct DenseGraph {
    unsigned n = 0;
    std::uint64_t degree = 0;
    std::vector<std::uint64_t> adj;  // row-major counts

    std::uint64_t at(unsigned i, unsigned j) const { return adj[static_cast<std::size_t>(i) * n + j]; }
};

// Torus graph on [m]^2, raised to the given power (walk-counting product).
DenseGraph materialize_torus(unsigned m, unsigned power);
DenseGraph complete_graph(unsigned n);

struct SpectralEstimate {
    double lambda = 0;     // second-largest absolute eigenvalue / degree
    double residual = 0;
    unsigned iterations = 0;
    bool converged = false;
};

// Power iteration on the component orthogonal to the all-ones vector.
SpectralEstimate spectral_bound_estimate(const DenseGraph& g);

// Exact probability that a uniform random walk of length l on the torus
// [m]^2 lies in W at every position in I, by enumerating all m^2 * 8^(l-1)
// walks. Requires m^2 * 8^(l-1) <= 10^7.
double hitting_probability_exact(unsigned m, const std::vector<std::uint8_t>& in_w,
                                 std::span<const unsigned> positions, unsigned l);

// Enumerates every walk of length l on the torus [m]^2 (same size bound),
// passing the vertex sequence (index x*m + y) to the callback once per
// (start, label sequence).
void enumerate_torus_walks(unsigned m, unsigned l,
                           const std::function<void(std::span<const std::uint32_t>)>& fn);

}  // namespace cardsketch
