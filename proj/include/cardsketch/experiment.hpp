#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cardsketch/codec.hpp"
#include "cardsketch/outer.hpp"

namespace cardsketch {

// Bulk construction of the sketch of an element set. Accumulates the
// uncompressed per-bin level maxima and compresses once at the end, which
// is the state any single/merge sequence over the same set reaches (the
// history-independence suites pin that equality bit for bit).
class SketchAccumulator {
public:
    SketchAccumulator(const SeedTheta& seed, const OuterParams& op);

    void add(std::uint64_t x);
    VectorSketch finish() const;

private:
    const OuterParams* op_;
    const SeedTheta* seed_;
    RowBlockHasher block_;                        // all m*l rows, flattened
    std::vector<std::vector<std::int64_t>> raw_;  // one uncompressed table per repetition
    mutable std::vector<std::uint32_t> bins_;
    mutable std::vector<std::uint8_t> levels_;
};

enum class Topology : std::uint8_t { sequential = 0, balanced = 1, random_tree = 2, star = 3 };

Topology topology_from_name(const std::string& name);
std::string topology_name(Topology t);

// Splits the elements over `workers` partitions (duplicating a fraction of
// each partition into its neighbor when dup_fraction > 0 — merges take
// unions, so overlap is legal), sketches each partition, and merges the
// partial sketches in the shape given by the topology.
VectorSketch sketch_with_topology(std::span<const std::uint64_t> elements,
                                  const SeedTheta& seed, const OuterParams& op,
                                  Topology topology, unsigned workers,
                                  double dup_fraction, std::uint64_t rng_seed);

struct ExperimentConfig {
    std::uint64_t n = 1ull << 20;
    double eps = 0.1;
    double delta = 0.05;
    Profile profile = Profile::practical;
    std::uint64_t c6_practical = kDefaultC6Practical;
    std::vector<std::uint64_t> cardinalities = {10, 1000, 100000};
    unsigned trials = 400;
    Topology topology = Topology::sequential;
    unsigned workers = 1;
    double dup_fraction = 0.0;
    std::uint64_t entropy_seed = 1;
};

struct CardinalitySummary {
    std::uint64_t cardinality = 0;
    unsigned trials = 0;
    unsigned failures = 0;
    double failure_rate = 0;
    double threshold = 0;  // delta + 3 * sqrt(delta (1-delta) / trials)
    bool pass = false;
};

struct ExperimentSummary {
    std::vector<CardinalitySummary> per_cardinality;
    bool pass = false;
};

// One fresh seed per trial; per-trial randomness is derived from the
// configured entropy seed and the trial index, so results do not depend on
// execution order. Writes "cardinality,trial,estimate,rel_error,failed"
// rows to the stream.
ExperimentSummary run_accuracy_experiment(const ExperimentConfig& cfg, std::ostream& csv);

// Samples `count` distinct elements of [n] (Floyd's algorithm).
std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t count,
                                           std::uint64_t rng_seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cardsketch
