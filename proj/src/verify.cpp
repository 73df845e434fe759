#include "cardsketch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cardsketch/entropy.hpp"
#include "cardsketch/expander.hpp"
#include "cardsketch/gf2.hpp"
#include "cardsketch/hash_family.hpp"

namespace cardsketch {

using BigInt = boost::multiprecision::cpp_int;

BallsBinsStats balls_bins_oracle(unsigned r, unsigned b) {
    if (b < 1) throw std::invalid_argument("need at least one bin");
    double total_d = std::pow(static_cast<double>(b), static_cast<double>(r));
    if (total_d > 1e7) throw std::invalid_argument("function space too large to enumerate");
    const std::uint64_t total = static_cast<std::uint64_t>(total_d + 0.5);

    BigInt sum = 0, sum_sq = 0;
    std::vector<unsigned> assign(r, 0);
    std::vector<std::uint8_t> hit(b);
    for (std::uint64_t fn = 0; fn < total; ++fn) {
        std::fill(hit.begin(), hit.end(), 0);
        std::uint64_t code = fn;
        unsigned image = 0;
        for (unsigned i = 0; i < r; ++i) {
            unsigned bin = static_cast<unsigned>(code % b);
            code /= b;
            if (!hit[bin]) {
                hit[bin] = 1;
                ++image;
            }
        }
        sum += image;
        sum_sq += static_cast<std::uint64_t>(image) * image;
    }
    BallsBinsStats stats;
    stats.functions = total;
    stats.expectation = Rational(sum, total);
    // Var = E[X^2] - E[X]^2
    stats.variance = Rational(sum_sq, total) - stats.expectation * stats.expectation;
    return stats;
}

Rational balls_bins_expectation_closed(unsigned r, unsigned b) {
    // b * (1 - ((b-1)/b)^r)
    BigInt bp = 1, bm = 1;
    for (unsigned i = 0; i < r; ++i) {
        bp *= b;
        bm *= b - 1;
    }
    return Rational(BigInt(b) * (bp - bm), bp);
}

CheckReport check_balls_bins_lemmas(unsigned max_b) {
    CheckReport report;
    report.name = "balls-and-bins moments";
    for (unsigned b = 1; b <= max_b; ++b) {
        for (unsigned r = 0; r <= b; ++r) {
            BallsBinsStats stats = balls_bins_oracle(r, b);
            ++report.cases;
            if (stats.expectation != balls_bins_expectation_closed(r, b)) {
                std::ostringstream os;
                os << "expectation mismatch at r=" << r << " b=" << b;
                report.violations.push_back(os.str());
            }
            const Rational var_bound(static_cast<std::uint64_t>(r) * (r > 0 ? r - 1 : 0), b);
            if (stats.variance > var_bound) {
                std::ostringstream os;
                os << "variance above r(r-1)/b at r=" << r << " b=" << b;
                report.violations.push_back(os.str());
            }
        }
    }
    return report;
}

KwiseBallsBins check_kwise_balls_bins(unsigned d, unsigned k, unsigned r, unsigned b,
                                      double eps) {
    if (b < 2 || (b & (b - 1)) != 0) throw std::invalid_argument("b must be a power of two");
    unsigned out_bits = 0;
    while ((1u << out_bits) < b) ++out_bits;
    if (out_bits > d) throw std::invalid_argument("b exceeds the hash range");
    const std::size_t seed_bits_total = static_cast<std::size_t>(k) * d;
    if (seed_bits_total > 24) throw std::invalid_argument("seed space too large to enumerate");
    if (r > (d == 64 ? ~0ull : (1ull << d))) throw std::invalid_argument("too many inputs");

    const std::uint64_t seeds = 1ull << seed_bits_total;
    const KWiseFamily family{k, d, out_bits};
    BigInt sum = 0, sum_sq = 0;
    std::vector<std::uint8_t> hit(b);
    for (std::uint64_t s = 0; s < seeds; ++s) {
        KWiseHash h = seed_from_index(family, Nat(s));
        std::fill(hit.begin(), hit.end(), 0);
        unsigned image = 0;
        for (std::uint64_t x = 0; x < r; ++x) {
            std::uint64_t bin = kwise_eval(h, x);
            if (!hit[bin]) {
                hit[bin] = 1;
                ++image;
            }
        }
        sum += image;
        sum_sq += static_cast<std::uint64_t>(image) * image;
    }
    const Rational mean = Rational(sum, seeds);
    const Rational var = Rational(sum_sq, seeds) - mean * mean;

    BallsBinsStats oracle = balls_bins_oracle(r, b);

    KwiseBallsBins res;
    res.d = d;
    res.k = k;
    res.r = r;
    res.b = b;
    res.eps_used = eps;
    res.exact_mean_delta = boost::multiprecision::abs(mean - oracle.expectation);
    res.exact_var_delta = boost::multiprecision::abs(var - oracle.variance);
    const double lbe = std::log(b / eps);
    res.qualifies = eps <= std::exp(-2.0) && k >= 1.0 + 5.0 * lbe / std::log(lbe);
    if (res.qualifies) {
        res.asserted = true;
        res.pass = static_cast<double>(res.exact_mean_delta) <= eps * r + 1e-12 &&
                   static_cast<double>(res.exact_var_delta) <= eps * eps + 1e-12;
    }
    return res;
}

double kl_divergence(double a, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
    if (a < 0.0 || a > 1.0) throw std::invalid_argument("a must be in [0,1]");
    double term1 = a == 0.0 ? 0.0 : a * std::log(a / p);
    double term2 = a == 1.0 ? 0.0 : (1.0 - a) * std::log((1.0 - a) / (1.0 - p));
    return term1 + term2;
}

CheckReport check_tail_bounds(unsigned torus_m, unsigned max_l) {
    CheckReport report;
    report.name = "expander walk tail bounds";
    const unsigned nv = torus_m * torus_m;
    if (nv > 16) throw std::invalid_argument("torus too large for subset enumeration");

    SpectralEstimate spec = spectral_bound_estimate(materialize_torus(torus_m, 1));
    if (!spec.converged) {
        report.violations.push_back("power iteration did not converge");
        return report;
    }
    const double lambda = spec.lambda + 1e-9;  // cushion over the numerical estimate
    const double tol = 1e-12;

    for (unsigned l = 1; l <= max_l; ++l) {
        // histogram of in-W position masks over all walks, per subset W
        std::vector<std::vector<std::uint32_t>> walks;
        enumerate_torus_walks(torus_m, l, [&](std::span<const std::uint32_t> w) {
            walks.emplace_back(w.begin(), w.end());
        });
        const double total = static_cast<double>(walks.size());

        for (std::uint32_t wset = 0; wset < (1u << nv); ++wset) {
            const unsigned wsize = static_cast<unsigned>(std::popcount(wset));
            const double mu = static_cast<double>(wsize) / nv;
            std::vector<std::uint64_t> mask_count(1u << l, 0);
            std::vector<std::uint64_t> sum_count(l + 1, 0);
            for (const auto& walk : walks) {
                std::uint32_t mask = 0;
                unsigned cnt = 0;
                for (unsigned i = 0; i < l; ++i) {
                    if ((wset >> walk[i]) & 1) {
                        mask |= 1u << i;
                        ++cnt;
                    }
                }
                ++mask_count[mask];
                ++sum_count[cnt];
            }
            // superset sums: walks whose mask covers I
            std::vector<std::uint64_t> covers = mask_count;
            for (unsigned bit = 0; bit < l; ++bit)
                for (std::uint32_t mask = 0; mask < (1u << l); ++mask)
                    if (!((mask >> bit) & 1)) covers[mask] += covers[mask | (1u << bit)];

            // hitting bound for every position subset I
            for (std::uint32_t iset = 0; iset < (1u << l); ++iset) {
                ++report.cases;
                const double exact = static_cast<double>(covers[iset]) / total;
                const double base = mu * (1.0 - lambda) + lambda;
                const double bound =
                    std::pow(base, static_cast<double>(std::popcount(iset)));
                if (exact > bound + tol) {
                    std::ostringstream os;
                    os << "hitting bound violated: l=" << l << " |W|=" << wsize
                       << " W=" << wset << " I=" << iset << " exact=" << exact
                       << " bound=" << bound;
                    report.violations.push_back(os.str());
                }
            }

            // KL Chernoff for the boolean function [v in W] on the grid c/l
            const double p = mu + lambda;
            if (p > 0.0 && p < 1.0) {
                std::vector<double> tail(l + 2, 0.0);
                for (unsigned c = l + 1; c-- > 0;)
                    tail[c] = tail[c + 1] + static_cast<double>(sum_count[c]) / total;
                for (unsigned c = 0; c <= l; ++c) {
                    const double gamma = static_cast<double>(c) / l;
                    if (gamma < p) continue;
                    ++report.cases;
                    const double exact = tail[c];
                    const double kl_bound = std::exp(-static_cast<double>(l) *
                                                     kl_divergence(gamma, p));
                    if (exact > kl_bound + tol) {
                        std::ostringstream os;
                        os << "KL bound violated: l=" << l << " W=" << wset
                           << " gamma=" << gamma << " exact=" << exact
                           << " bound=" << kl_bound;
                        report.violations.push_back(os.str());
                    }
                    if (gamma < 1.0) {
                        // weaker ln-form with the 2/e slack
                        ++report.cases;
                        const double weak = std::exp(
                            -static_cast<double>(l) *
                            (gamma * std::log(1.0 / p) - 2.0 / std::exp(1.0)));
                        if (exact > weak + tol) {
                            std::ostringstream os;
                            os << "ln-form bound violated: l=" << l << " W=" << wset
                               << " gamma=" << gamma;
                            report.violations.push_back(os.str());
                        }
                    }
                }
            }
        }
    }
    return report;
}

DeviationMcResult deviation_bound_mc(unsigned torus_m, unsigned l,
                                     std::uint64_t walks, std::uint64_t entropy_seed) {
    if (l < 2) throw std::invalid_argument("need at least two walk steps");
    DeviationMcResult res;
    res.walks = walks;
    res.lambda_required = std::exp(-static_cast<double>(l) *
                                   std::pow(std::log(static_cast<double>(l)), 3.0));

    const Nat vertices = Nat(torus_m) * torus_m;
    WalkSpace ws = make_walk_space(vertices, std::log(res.lambda_required), l);
    res.lambda_achieved = std::pow(kTorusLambda0, static_cast<double>(ws.power_t));

    // Vertex function bounded below 20, so P(f >= x) <= exp(-x (ln x)^3)
    // holds for all x >= 20 with room to spare; the value profile decays
    // geometrically to keep the sum distribution non-degenerate.
    auto f = [&](const Nat& v) {
        std::uint64_t idx = static_cast<std::uint64_t>(v);
        unsigned tz = static_cast<unsigned>(std::countr_zero(idx + 1));
        return 3.0 * static_cast<double>(std::min(tz, 6u));
    };

    const double c1 = std::exp(2.0) + std::exp(3.0) + (std::exp(1.0) - 1.0);
    const double threshold = c1 * static_cast<double>(l);

    Mt19937BitSource entropy(entropy_seed);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < walks; ++t) {
        WalkSeed seed = sample_walk(ws, entropy);
        std::vector<Nat> verts = walk_from_seed(ws, seed);
        double sum = 0;
        for (const Nat& v : verts) sum += f(v);
        if (sum >= threshold) ++hits;
    }
    res.hits = hits;
    res.empirical = static_cast<double>(hits) / static_cast<double>(walks);
    res.bound = std::exp(-static_cast<double>(l));
    res.slack = 3.0 * std::sqrt(res.bound * (1.0 - res.bound) / static_cast<double>(walks));
    res.pass = res.empirical <= res.bound + res.slack;
    return res;
}

}  // namespace cardsketch
