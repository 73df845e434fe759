#include "cardsketch/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace cardsketch {

namespace {

std::vector<RowHasher> flatten_rows(const SeedTheta& seed, const OuterParams& op) {
    if (seed.reps.size() != op.m) throw std::invalid_argument("seed/params mismatch");
    std::vector<RowHasher> rows;
    rows.reserve(static_cast<std::size_t>(op.m) * op.inner.l);
    for (const SeedOmega& omega : seed.reps) {
        if (omega.hashers.size() != op.inner.l)
            throw std::invalid_argument("seed/params mismatch");
        rows.insert(rows.end(), omega.hashers.begin(), omega.hashers.end());
    }
    return rows;
}

}  // namespace

SketchAccumulator::SketchAccumulator(const SeedTheta& seed, const OuterParams& op)
    : op_(&op), seed_(&seed), block_(flatten_rows(seed, op), op.inner) {
    raw_.assign(op.m, std::vector<std::int64_t>(
                          static_cast<std::size_t>(op.inner.l) * op.inner.b, -1));
    bins_.resize(block_.rows());
    levels_.resize(block_.rows());
}

void SketchAccumulator::add(std::uint64_t x) {
    const Params& p = op_->inner;
    if (x >= p.n) throw std::invalid_argument("element outside universe");
    block_.eval(x, bins_.data(), levels_.data());
    unsigned r = 0;
    for (unsigned rep = 0; rep < op_->m; ++rep) {
        std::vector<std::int64_t>& table = raw_[rep];
        for (unsigned i = 0; i < p.l; ++i, ++r) {
            std::int64_t& slot = table[static_cast<std::size_t>(i) * p.b + bins_[r]];
            const std::int64_t lvl = levels_[r];
            if (lvl > slot) slot = lvl;
        }
    }
}

VectorSketch SketchAccumulator::finish() const {
    VectorSketch d;
    d.parts.reserve(op_->m);
    for (unsigned rep = 0; rep < op_->m; ++rep) {
        Sketch s;
        s.rows = op_->inner.l;
        s.bins = static_cast<std::uint32_t>(op_->inner.b);
        s.q = 0;
        s.table = raw_[rep];
        d.parts.push_back(compress(std::move(s), op_->inner));
    }
    return d;
}

Topology topology_from_name(const std::string& name) {
    if (name == "sequential") return Topology::sequential;
    if (name == "balanced") return Topology::balanced;
    if (name == "random") return Topology::random_tree;
    if (name == "star") return Topology::star;
    throw std::invalid_argument("unknown topology: " + name);
}

std::string topology_name(Topology t) {
    switch (t) {
        case Topology::sequential: return "sequential";
        case Topology::balanced: return "balanced";
        case Topology::random_tree: return "random";
        case Topology::star: return "star";
    }
    throw std::invalid_argument("bad topology value");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

VectorSketch sketch_with_topology(std::span<const std::uint64_t> elements,
                                  const SeedTheta& seed, const OuterParams& op,
                                  Topology topology, unsigned workers,
                                  double dup_fraction, std::uint64_t rng_seed) {
    if (workers < 1) throw std::invalid_argument("need at least one worker");
    if (dup_fraction < 0.0 || dup_fraction > 1.0)
        throw std::invalid_argument("dup fraction must be in [0,1]");

    // contiguous partitions, plus optional duplication into the next worker
    std::vector<std::vector<std::uint64_t>> parts(workers);
    for (std::size_t i = 0; i < elements.size(); ++i)
        parts[i * workers / std::max<std::size_t>(elements.size(), 1)].push_back(elements[i]);
    if (dup_fraction > 0.0 && workers > 1) {
        std::mt19937_64 rng(splitmix64(rng_seed ^ 0x6475706c69636174ull));
        std::bernoulli_distribution dup(dup_fraction);
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t original = parts[w].size();
            for (std::size_t i = 0; i < original; ++i)
                if (dup(rng)) parts[(w + 1) % workers].push_back(parts[w][i]);
        }
    }

    std::vector<VectorSketch> partials;
    partials.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        SketchAccumulator acc(seed, op);
        for (std::uint64_t x : parts[w]) acc.add(x);
        partials.push_back(acc.finish());
    }

    switch (topology) {
        case Topology::sequential:
        case Topology::star: {
            // star: every worker ships to one collector; same fold order
            VectorSketch result = partials[0];
            for (unsigned w = 1; w < workers; ++w)
                result = outer_merge(result, partials[w], op);
            return result;
        }
        case Topology::balanced: {
            std::vector<VectorSketch> layer = std::move(partials);
            while (layer.size() > 1) {
                std::vector<VectorSketch> next;
                for (std::size_t i = 0; i + 1 < layer.size(); i += 2)
                    next.push_back(outer_merge(layer[i], layer[i + 1], op));
                if (layer.size() % 2 == 1) next.push_back(std::move(layer.back()));
                layer = std::move(next);
            }
            return layer[0];
        }
        case Topology::random_tree: {
            std::mt19937_64 rng(splitmix64(rng_seed ^ 0x7472656527726e64ull));
            std::vector<VectorSketch> pool = std::move(partials);
            while (pool.size() > 1) {
                std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
                std::size_t i = pick(rng);
                std::size_t j = pick(rng);
                if (i == j) continue;
                if (i > j) std::swap(i, j);
                VectorSketch merged = outer_merge(pool[i], pool[j], op);
                pool[i] = std::move(merged);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
            }
            return pool[0];
        }
    }
    throw std::invalid_argument("bad topology value");
}

std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t count,
                                           std::uint64_t rng_seed) {
    if (count > n) throw std::invalid_argument("cannot sample more elements than the universe");
    std::mt19937_64 rng(rng_seed);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(count) * 2);
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = n - count; i < n; ++i) {
        std::uniform_int_distribution<std::uint64_t> pick(0, i);
        std::uint64_t candidate = pick(rng);
        if (chosen.insert(candidate).second) {
            out.push_back(candidate);
        } else {
            chosen.insert(i);
            out.push_back(i);
        }
    }
    return out;
}

ExperimentSummary run_accuracy_experiment(const ExperimentConfig& cfg, std::ostream& csv) {
    if (cfg.trials < 1) throw std::invalid_argument("need at least one trial");
    const OuterParams op =
        plan(cfg.n, cfg.eps, cfg.delta, cfg.profile, cfg.c6_practical);

    csv << "cardinality,trial,estimate,rel_error,failed\n";
    ExperimentSummary summary;
    summary.pass = true;
    for (std::size_t ci = 0; ci < cfg.cardinalities.size(); ++ci) {
        const std::uint64_t card = cfg.cardinalities[ci];
        CardinalitySummary cs;
        cs.cardinality = card;
        cs.trials = cfg.trials;
        for (unsigned trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t trial_seed =
                splitmix64(cfg.entropy_seed ^ splitmix64((ci << 32) ^ trial));
            Mt19937BitSource entropy(trial_seed);
            SeedTheta seed = outer_init(op, entropy);
            std::vector<std::uint64_t> elements =
                sample_distinct(cfg.n, card, splitmix64(trial_seed ^ 0x656c656d656e7473ull));

            VectorSketch sk =
                sketch_with_topology(elements, seed, op, cfg.topology, cfg.workers,
                                     cfg.dup_fraction, trial_seed);
            const double est = outer_estimate(sk, op);
            const double rel =
                std::abs(est - static_cast<double>(card)) / static_cast<double>(card);
            const bool failed = rel > cfg.eps;
            if (failed) ++cs.failures;
            csv << card << ',' << trial << ',' << est << ',' << rel << ','
                << (failed ? 1 : 0) << '\n';
        }
        cs.failure_rate = static_cast<double>(cs.failures) / cfg.trials;
        cs.threshold = cfg.delta + 3.0 * std::sqrt(cfg.delta * (1.0 - cfg.delta) /
                                                   static_cast<double>(cfg.trials));
        cs.pass = cs.failure_rate <= cs.threshold;
        summary.pass = summary.pass && cs.pass;
        summary.per_cardinality.push_back(cs);
    }
    return summary;
}

}  // namespace cardsketch
