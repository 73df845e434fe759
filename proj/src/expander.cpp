#include "cardsketch/expander.hpp"

#include <cmath>
#include <stdexcept>

namespace cardsketch {

namespace {

// In-place MGG step; t is reusable scratch so long walks do not churn
// allocations. The adjusted coordinate stays below 4m, so a few
// subtractions reduce it.
void step_inplace(const Nat& m, Nat& x, Nat& y, unsigned label, Nat& t) {
    const bool on_x = label < 4;
    Nat& target = on_x ? x : y;
    const Nat& other = on_x ? y : x;
    switch (label & 3) {
        case 0:  // +2*other
            t = other;
            t <<= 1;
            t += target;
            break;
        case 1:  // +2*other + 1
            t = other;
            t <<= 1;
            t += target;
            ++t;
            break;
        case 2:  // -2*other
            t = m;
            t -= other;
            t <<= 1;
            t += target;
            break;
        case 3:  // -2*other - 1
            t = m;
            t -= other;
            t <<= 1;
            t += target;
            --t;
            break;
    }
    while (t >= m) t -= m;
    target.swap(t);
}

TorusPoint step_impl(const Nat& m, const TorusPoint& v, unsigned label) {
    if (label >= kGraphDegree) throw std::invalid_argument("edge label out of range");
    TorusPoint out = v;
    Nat scratch;
    step_inplace(m, out.x, out.y, label, scratch);
    return out;
}

Nat torus_side_for(const Nat& n) {
    using boost::multiprecision::sqrt;
    if (n < 1) throw std::invalid_argument("vertex count must be positive");
    if (is_power_of_two(n)) {
        std::size_t e = index_bits(n);  // n = 2^e
        return Nat{1} << ((e + 1) / 2);
    }
    Nat s = sqrt(n);
    if (s * s == n) return s;
    Nat s2 = sqrt(Nat{2 * n});
    if (s2 * s2 == 2 * n) return s2;
    throw std::invalid_argument(
        "vertex count has no exact torus adaptation (needs m^2 = N or 2N)");
}

}  // namespace

TorusPoint base_step(const BaseGraph& g, const TorusPoint& v, unsigned label) {
    if (g.m < 1) throw std::invalid_argument("empty torus");
    if (v.x < 0 || v.x >= g.m || v.y < 0 || v.y >= g.m)
        throw std::invalid_argument("vertex outside torus");
    if (label >= kGraphDegree) throw std::invalid_argument("edge label out of range");
    return step_impl(g.m, v, label);
}

WalkSpace make_walk_space(const Nat& vertex_count, double ln_lambda_target,
                          unsigned walk_len) {
    if (walk_len < 1) throw std::invalid_argument("walk length must be positive");
    WalkSpace ws;
    ws.vertex_count = vertex_count;
    ws.m = torus_side_for(vertex_count);
    ws.ln_lambda_target = ln_lambda_target;
    const double need = -ln_lambda_target / -std::log(kTorusLambda0);
    ws.power_t = need <= 1.0 ? 1 : static_cast<unsigned>(std::ceil(need));
    ws.walk_len = walk_len;
    return ws;
}

Nat walk_space_size(const WalkSpace& ws) {
    return ws.vertex_count << (3 * ws.step_count());
}

namespace {

TorusPoint lift(const WalkSpace& ws, const Nat& s) {
    Nat x, y;
    boost::multiprecision::divide_qr(s, ws.m, x, y);
    return {std::move(x), std::move(y)};
}

Nat project(const WalkSpace& ws, const TorusPoint& v) {
    Nat s = v.x * ws.m + v.y;
    if (s >= ws.vertex_count) s -= ws.vertex_count;
    return s;
}

void check_seed(const WalkSpace& ws, const WalkSeed& seed) {
    if (seed.start < 0 || seed.start >= ws.vertex_count)
        throw std::invalid_argument("walk start out of range");
    if (seed.steps.size() != ws.step_count())
        throw std::invalid_argument("walk seed has wrong step count");
    for (std::uint8_t lab : seed.steps)
        if (lab >= kGraphDegree) throw std::invalid_argument("edge label out of range");
}

}  // namespace

std::vector<Nat> walk_from_seed(const WalkSpace& ws, const WalkSeed& seed) {
    check_seed(ws, seed);
    std::vector<Nat> out;
    out.reserve(ws.walk_len);
    TorusPoint v = lift(ws, seed.start);
    out.push_back(project(ws, v));
    std::size_t idx = 0;
    Nat scratch;
    for (unsigned step = 1; step < ws.walk_len; ++step) {
        for (unsigned t = 0; t < ws.power_t; ++t)
            step_inplace(ws.m, v.x, v.y, seed.steps[idx++], scratch);
        out.push_back(project(ws, v));
    }
    return out;
}

WalkSeed sample_walk(const WalkSpace& ws, BitSource& entropy) {
    WalkSeed seed;
    const std::size_t nbits = index_bits(ws.vertex_count);
    do {
        seed.start = entropy.next_nat(nbits);
    } while (seed.start >= ws.vertex_count);
    seed.steps.resize(ws.step_count());
    for (auto& lab : seed.steps)
        lab = static_cast<std::uint8_t>(entropy.next_bits(3));
    return seed;
}

Nat walk_seed_to_index(const WalkSpace& ws, const WalkSeed& seed) {
    check_seed(ws, seed);
    Nat idx = seed.start;
    for (std::uint8_t lab : seed.steps) {
        idx <<= 3;
        idx |= lab;
    }
    return idx;
}

WalkSeed walk_seed_from_index(const WalkSpace& ws, const Nat& index) {
    if (index < 0 || index >= walk_space_size(ws))
        throw std::invalid_argument("walk index out of range");
    WalkSeed seed;
    const std::size_t steps = ws.step_count();
    seed.steps.resize(steps);
    // label i occupies bits [3*(steps-1-i), 3*(steps-1-i)+3)
    for (std::size_t i = 0; i < steps; ++i) {
        const std::size_t off = 3 * (steps - 1 - i);
        unsigned lab = 0;
        for (unsigned bit = 0; bit < 3; ++bit)
            if (boost::multiprecision::bit_test(index, static_cast<unsigned>(off + bit)))
                lab |= 1u << bit;
        seed.steps[i] = static_cast<std::uint8_t>(lab);
    }
    seed.start = index >> (3 * steps);
    return seed;
}

DenseGraph materialize_torus(unsigned m, unsigned power) {
    if (m == 0 || static_cast<std::uint64_t>(m) * m > 10000)
        throw std::invalid_argument("torus too large to materialize");
    const unsigned n = m * m;
    DenseGraph base;
    base.n = n;
    base.degree = kGraphDegree;
    base.adj.assign(static_cast<std::size_t>(n) * n, 0);
    BaseGraph g{Nat{m}};
    for (unsigned x = 0; x < m; ++x) {
        for (unsigned y = 0; y < m; ++y) {
            for (unsigned lab = 0; lab < kGraphDegree; ++lab) {
                TorusPoint p = base_step(g, {Nat{x}, Nat{y}}, lab);
                unsigned u = x * m + y;
                unsigned v = static_cast<unsigned>(p.x) * m + static_cast<unsigned>(p.y);
                base.adj[static_cast<std::size_t>(u) * n + v] += 1;
            }
        }
    }
    if (power <= 1) return base;
    DenseGraph result = base;
    for (unsigned step = 1; step < power; ++step) {
        std::vector<std::uint64_t> next(static_cast<std::size_t>(n) * n, 0);
        for (unsigned i = 0; i < n; ++i)
            for (unsigned k = 0; k < n; ++k) {
                std::uint64_t a = result.adj[static_cast<std::size_t>(i) * n + k];
                if (a == 0) continue;
                for (unsigned j = 0; j < n; ++j)
                    next[static_cast<std::size_t>(i) * n + j] +=
                        a * base.adj[static_cast<std::size_t>(k) * n + j];
            }
        result.adj = std::move(next);
        result.degree *= kGraphDegree;
    }
    return result;
}

DenseGraph complete_graph(unsigned n) {
    if (n < 2 || static_cast<std::uint64_t>(n) * n > 100000000ull)
        throw std::invalid_argument("bad complete graph size");
    DenseGraph g;
    g.n = n;
    g.degree = n - 1;
    g.adj.assign(static_cast<std::size_t>(n) * n, 1);
    for (unsigned i = 0; i < n; ++i) g.adj[static_cast<std::size_t>(i) * n + i] = 0;
    return g;
}

SpectralEstimate spectral_bound_estimate(const DenseGraph& g) {
    SpectralEstimate est;
    if (g.n <= 1) {  // single vertex: lambda = 0 by convention
        est.converged = true;
        return est;
    }
    const unsigned n = g.n;
    std::vector<double> v(n), w(n), tmp(n);
    // deterministic pseudo-random start
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    for (auto& x : v) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        x = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
    auto project_ones = [&](std::vector<double>& u) {
        double mean = 0;
        for (double x : u) mean += x;
        mean /= n;
        for (double& x : u) x -= mean;
    };
    auto norm = [&](const std::vector<double>& u) {
        double s = 0;
        for (double x : u) s += x * x;
        return std::sqrt(s);
    };
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (unsigned i = 0; i < n; ++i) {
            double s = 0;
            const std::uint64_t* row = g.adj.data() + static_cast<std::size_t>(i) * n;
            for (unsigned j = 0; j < n; ++j) s += static_cast<double>(row[j]) * in[j];
            out[i] = s;
        }
    };
    project_ones(v);
    double nv = norm(v);
    if (nv == 0) v[0] = 1, v[1 % n] = -1, nv = std::sqrt(2.0);
    for (double& x : v) x /= nv;

    double prev = -1;
    const unsigned max_iters = 20000;
    for (unsigned it = 1; it <= max_iters; ++it) {
        // two applications per iteration: A^2 has non-negative eigenvalues on
        // the complement of the ones vector, so the norm ratio converges even
        // when the extreme eigenvalue is negative
        apply(v, tmp);
        apply(tmp, w);
        project_ones(w);
        double nw = norm(w);
        if (nw == 0) {  // orthogonal complement annihilated: lambda = 0
            est.lambda = 0;
            est.converged = true;
            est.iterations = it;
            return est;
        }
        double cur = std::sqrt(nw);
        est.iterations = it;
        est.residual = std::abs(cur - prev);
        if (prev >= 0 && est.residual <= 1e-13 * static_cast<double>(g.degree)) {
            est.lambda = cur / static_cast<double>(g.degree);
            est.converged = true;
            return est;
        }
        prev = cur;
        for (unsigned i = 0; i < n; ++i) v[i] = w[i] / nw;
    }
    est.lambda = prev / static_cast<double>(g.degree);
    est.converged = false;
    return est;
}

namespace {

std::uint32_t torus_step_u32(unsigned m, std::uint32_t v, unsigned label) {
    std::uint64_t x = v / m, y = v % m, mm = m;
    switch (label) {
        case 0: x = (x + 2 * y) % mm; break;
        case 1: x = (x + 2 * y + 1) % mm; break;
        case 2: x = (x + 2 * (mm - y)) % mm; break;
        case 3: x = (x + 2 * (mm - y) + (mm - 1)) % mm; break;
        case 4: y = (y + 2 * x) % mm; break;
        case 5: y = (y + 2 * x + 1) % mm; break;
        case 6: y = (y + 2 * (mm - x)) % mm; break;
        case 7: y = (y + 2 * (mm - x) + (mm - 1)) % mm; break;
    }
    return static_cast<std::uint32_t>(x * mm + y);
}

}  // namespace

void enumerate_torus_walks(unsigned m, unsigned l,
                           const std::function<void(std::span<const std::uint32_t>)>& fn) {
    if (l < 1) throw std::invalid_argument("walk length must be positive");
    const std::uint64_t vertices = static_cast<std::uint64_t>(m) * m;
    double total = static_cast<double>(vertices) * std::pow(8.0, l - 1);
    if (total > 1e7) throw std::invalid_argument("walk space too large to enumerate");

    std::vector<std::uint32_t> walk(l);
    std::vector<unsigned> labels(l > 1 ? l - 1 : 0, 0);
    for (std::uint32_t start = 0; start < vertices; ++start) {
        // odometer over label sequences
        std::fill(labels.begin(), labels.end(), 0);
        while (true) {
            walk[0] = start;
            for (unsigned i = 1; i < l; ++i)
                walk[i] = torus_step_u32(m, walk[i - 1], labels[i - 1]);
            fn(walk);
            unsigned pos = 0;
            for (; pos < labels.size(); ++pos) {
                if (++labels[pos] < kGraphDegree) break;
                labels[pos] = 0;
            }
            if (pos == labels.size()) break;
        }
    }
}

double hitting_probability_exact(unsigned m, const std::vector<std::uint8_t>& in_w,
                                 std::span<const unsigned> positions, unsigned l) {
    const std::uint64_t vertices = static_cast<std::uint64_t>(m) * m;
    if (in_w.size() != vertices) throw std::invalid_argument("membership size mismatch");
    for (unsigned p : positions)
        if (p >= l) throw std::invalid_argument("position outside walk");
    std::uint64_t hits = 0, total = 0;
    enumerate_torus_walks(m, l, [&](std::span<const std::uint32_t> walk) {
        ++total;
        for (unsigned p : positions)
            if (!in_w[walk[p]]) return;
        ++hits;
    });
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace cardsketch
