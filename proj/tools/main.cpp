#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cardsketch/codec.hpp"
#include "cardsketch/experiment.hpp"
#include "cardsketch/verify.hpp"

namespace {

using namespace cardsketch;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

Profile parse_profile(const std::string& name) {
    if (name == "strict") return Profile::strict;
    if (name == "practical") return Profile::practical;
    throw CLI::ValidationError("--profile", "must be 'strict' or 'practical'");
}

struct ParamFlags {
    std::uint64_t n = 1ull << 20;
    double eps = 0.1;
    double delta = 0.05;
    std::string profile = "practical";
    std::uint64_t c6_practical = kDefaultC6Practical;

    void attach(CLI::App* cmd) {
        cmd->add_option("--n", n, "universe size (elements are 0..n-1)");
        cmd->add_option("--eps", eps, "relative accuracy in (0,1)");
        cmd->add_option("--delta", delta, "failure probability in (0,1)");
        cmd->add_option("--profile", profile, "'strict' or 'practical'");
        cmd->add_option("--c6-practical", c6_practical,
                        "bin-count constant for the practical profile");
    }

    OuterParams make_plan() const {
        return plan(n, eps, delta, parse_profile(profile), c6_practical);
    }
};

// Elements arrive newline-delimited decimal or packed little-endian u64.
std::vector<std::uint64_t> read_elements(std::istream& in, const std::string& format,
                                         std::uint64_t n) {
    std::vector<std::uint64_t> out;
    if (format == "text") {
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::size_t pos = 0;
            std::uint64_t v = std::stoull(line, &pos);
            if (pos != line.size()) throw std::runtime_error("bad element line: " + line);
            if (v >= n) throw std::runtime_error("element " + line + " outside universe");
            out.push_back(v);
        }
    } else if (format == "u64le") {
        char buf[8];
        while (in.read(buf, 8)) {
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i)
                v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
            if (v >= n) throw std::runtime_error("element outside universe");
            out.push_back(v);
        }
        if (in.gcount() != 0) throw std::runtime_error("trailing bytes in binary input");
    } else {
        throw std::runtime_error("unknown input format: " + format);
    }
    return out;
}

int cmd_init(const ParamFlags& flags, bool have_entropy, std::uint64_t entropy_seed,
             const std::string& output) {
    OuterParams op = flags.make_plan();
    if (!have_entropy) {
        std::random_device rd;
        entropy_seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    Mt19937BitSource entropy(entropy_seed);
    SeedTheta seed = outer_init(op, entropy);
    write_file(output, encode_seed_file(op, seed));
    std::cerr << "seed written: m=" << op.m << " l=" << op.inner.l
              << " b=" << op.inner.b << " k=" << op.inner.k << '\n';
    return 0;
}

int cmd_sketch(const std::string& seed_path, const std::string& input,
               const std::string& format, const std::string& output) {
    LoadedSeed loaded = decode_seed_file(read_file(seed_path));
    std::vector<std::uint64_t> elements;
    if (input == "-") {
        elements = read_elements(std::cin, format, loaded.plan.inner.n);
    } else {
        std::ifstream in(input, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + input);
        elements = read_elements(in, format, loaded.plan.inner.n);
    }
    SketchAccumulator acc(loaded.seed, loaded.plan);
    for (std::uint64_t x : elements) acc.add(x);
    write_file(output, encode_sketch_file(loaded.plan, loaded.seed_id, acc.finish()));
    std::cerr << "sketched " << elements.size() << " elements\n";
    return 0;
}

int cmd_merge(const std::vector<std::string>& inputs, const std::string& output) {
    LoadedSketch acc = decode_sketch_file(read_file(inputs[0]));
    for (std::size_t i = 1; i < inputs.size(); ++i) {
        LoadedSketch next = decode_sketch_file(read_file(inputs[i]));
        if (next.plan != acc.plan || next.seed_id != acc.seed_id)
            throw std::runtime_error(
                "refusing to merge: " + inputs[i] +
                " was built with different parameters or a different seed");
        acc.sketch = outer_merge(acc.sketch, next.sketch, acc.plan);
    }
    write_file(output, encode_sketch_file(acc.plan, acc.seed_id, acc.sketch));
    return 0;
}

int cmd_estimate(const std::string& input) {
    LoadedSketch loaded = decode_sketch_file(read_file(input));
    double est = outer_estimate(loaded.sketch, loaded.plan);
    std::ostringstream os;
    os.precision(17);
    os << est;
    std::cout << os.str() << '\n';
    return 0;
}

int cmd_bench(const ParamFlags& flags, const std::string& cards_csv, unsigned trials,
              const std::string& topology, unsigned workers, double dup_fraction,
              std::uint64_t entropy_seed, const std::string& output) {
    ExperimentConfig cfg;
    cfg.n = flags.n;
    cfg.eps = flags.eps;
    cfg.delta = flags.delta;
    cfg.profile = parse_profile(flags.profile);
    cfg.c6_practical = flags.c6_practical;
    cfg.trials = trials;
    cfg.topology = topology_from_name(topology);
    cfg.workers = workers;
    cfg.dup_fraction = dup_fraction;
    cfg.entropy_seed = entropy_seed;
    cfg.cardinalities.clear();
    std::stringstream ss(cards_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) cfg.cardinalities.push_back(std::stoull(item));
    }
    if (cfg.cardinalities.empty()) throw std::runtime_error("no cardinalities given");

    if (cfg.profile == Profile::strict) {
        OuterParams op = plan(cfg.n, cfg.eps, cfg.delta, cfg.profile, cfg.c6_practical);
        std::cerr << "warning: strict profile uses b = " << op.inner.b
                  << " bins per row; experiments at this size are generally infeasible\n";
    }

    ExperimentSummary summary;
    if (output == "-") {
        summary = run_accuracy_experiment(cfg, std::cout);
    } else {
        std::ofstream out(output, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + output + " for writing");
        summary = run_accuracy_experiment(cfg, out);
    }
    for (const CardinalitySummary& cs : summary.per_cardinality) {
        std::cerr << "cardinality " << cs.cardinality << ": " << cs.failures << '/'
                  << cs.trials << " failures (rate " << cs.failure_rate
                  << ", threshold " << cs.threshold << ") "
                  << (cs.pass ? "ok" : "FAIL") << '\n';
    }
    return summary.pass ? 0 : 1;
}

int cmd_verify(unsigned max_b, unsigned torus_m, unsigned max_l, std::uint64_t mc_walks,
               std::uint64_t entropy_seed) {
    int rc = 0;

    CheckReport bb = check_balls_bins_lemmas(max_b);
    std::cout << bb.name << ": " << bb.cases << " cases, "
              << bb.violations.size() << " violations\n";
    for (const auto& v : bb.violations) std::cout << "  " << v << '\n';
    rc |= bb.pass() ? 0 : 1;

    struct KwiseCase {
        unsigned d, k, r, b;
    } kwise_cases[] = {{4, 3, 3, 4}, {4, 2, 2, 4}, {3, 4, 4, 8}, {4, 4, 3, 4}};
    for (const auto& c : kwise_cases) {
        KwiseBallsBins kb = check_kwise_balls_bins(c.d, c.k, c.r, c.b);
        std::cout << "k-wise balls-and-bins d=" << c.d << " k=" << c.k << " r=" << c.r
                  << " b=" << c.b << ": |dE|=" << kb.exact_mean_delta
                  << " |dVar|=" << kb.exact_var_delta
                  << (kb.qualifies ? " (asserted)" : " (informational)")
                  << (kb.pass ? "" : " FAIL") << '\n';
        rc |= kb.pass ? 0 : 1;
    }

    CheckReport tails = check_tail_bounds(torus_m, max_l);
    std::cout << tails.name << ": " << tails.cases << " cases, "
              << tails.violations.size() << " violations\n";
    for (const auto& v : tails.violations) std::cout << "  " << v << '\n';
    rc |= tails.pass() ? 0 : 1;

    DeviationMcResult mc = deviation_bound_mc(8, 3, mc_walks, entropy_seed);
    std::cout << "walk deviation Monte-Carlo: " << mc.hits << '/' << mc.walks
              << " tail hits, bound " << mc.bound << " + slack " << mc.slack
              << (mc.pass ? " ok" : " FAIL") << '\n';
    rc |= mc.pass ? 0 : 1;

    std::cout << (rc == 0 ? "all checks passed\n" : "violations found\n");
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"history-independent mergeable distinct-elements sketch"};
    app.require_subcommand(1);

    ParamFlags init_flags;
    std::uint64_t entropy_seed = 0;
    std::string output;

    CLI::App* init = app.add_subcommand("init", "draw a seed and write it to a file");
    init_flags.attach(init);
    CLI::Option* entropy_opt =
        init->add_option("--entropy-seed", entropy_seed,
                         "64-bit PRNG seed (omit for OS entropy)");
    init->add_option("--output", output, "seed file path")->required();

    CLI::App* sketch_cmd = app.add_subcommand("sketch", "sketch a stream of elements");
    std::string seed_path, input = "-", format = "text";
    sketch_cmd->add_option("--seed", seed_path, "seed file")->required();
    sketch_cmd->add_option("--input", input, "element file, '-' for stdin");
    sketch_cmd->add_option("--format", format, "'text' (newline decimal) or 'u64le'");
    sketch_cmd->add_option("--output", output, "sketch file path")->required();

    CLI::App* merge_cmd = app.add_subcommand("merge", "merge sketch files");
    std::vector<std::string> merge_inputs;
    merge_cmd->add_option("inputs", merge_inputs, "sketch files")->expected(2, -1);
    merge_cmd->add_option("--output", output, "merged sketch path")->required();

    CLI::App* est_cmd = app.add_subcommand("estimate", "print the estimate of a sketch");
    std::string est_input;
    est_cmd->add_option("input", est_input, "sketch file")->required();

    CLI::App* bench_cmd =
        app.add_subcommand("bench", "accuracy experiment with CSV output");
    ParamFlags bench_flags;
    bench_flags.attach(bench_cmd);
    std::string cards = "10,1000,100000", topology = "sequential", bench_out = "-";
    unsigned trials = 400, workers = 1;
    double dup_fraction = 0.0;
    std::uint64_t bench_entropy = 1;
    bench_cmd->add_option("--cards", cards, "comma-separated cardinalities");
    bench_cmd->add_option("--trials", trials, "trials per cardinality");
    bench_cmd->add_option("--topology", topology,
                          "sequential | balanced | random | star");
    bench_cmd->add_option("--workers", workers, "partitions for the merge topology");
    bench_cmd->add_option("--dup-fraction", dup_fraction,
                          "fraction of each partition duplicated into its neighbor");
    bench_cmd->add_option("--entropy-seed", bench_entropy, "experiment PRNG seed");
    bench_cmd->add_option("--output", bench_out, "CSV path, '-' for stdout");

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the exhaustive oracle checks");
    unsigned max_b = 6, torus_m = 3, max_l = 4;
    std::uint64_t mc_walks = 100000, verify_entropy = 7;
    verify_cmd->add_option("--max-b", max_b, "largest bin count for the moment checks");
    verify_cmd->add_option("--torus-m", torus_m, "torus side for the walk checks");
    verify_cmd->add_option("--max-l", max_l, "largest walk length for the walk checks");
    verify_cmd->add_option("--walks", mc_walks, "Monte-Carlo walk count");
    verify_cmd->add_option("--entropy-seed", verify_entropy, "Monte-Carlo PRNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (init->parsed())
            return cmd_init(init_flags, entropy_opt->count() > 0, entropy_seed, output);
        if (sketch_cmd->parsed()) return cmd_sketch(seed_path, input, format, output);
        if (merge_cmd->parsed()) return cmd_merge(merge_inputs, output);
        if (est_cmd->parsed()) return cmd_estimate(est_input);
        if (bench_cmd->parsed())
            return cmd_bench(bench_flags, cards, trials, topology, workers, dup_fraction,
                             bench_entropy, bench_out);
        if (verify_cmd->parsed())
            return cmd_verify(max_b, torus_m, max_l, mc_walks, verify_entropy);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
