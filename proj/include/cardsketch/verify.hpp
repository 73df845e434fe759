#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cardsketch {

// Exact rational arithmetic for the balls-and-bins closed forms; float
// comparison would defeat the point of the exhaustive checks.
using Rational = boost::multiprecision::cpp_rational;

struct BallsBinsStats {
    Rational expectation;
    Rational variance;
    std::uint64_t functions = 0;  // b^r enumerated
};

// Enumerates all b^r functions [r] -> [b] and returns the exact mean and
// variance of the image size. Requires b^r <= 10^7.
BallsBinsStats balls_bins_oracle(unsigned r, unsigned b);

// b * (1 - (1 - 1/b)^r) as an exact rational.
Rational balls_bins_expectation_closed(unsigned r, unsigned b);

struct CheckReport {
    std::string name;
    std::uint64_t cases = 0;
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

// For all r <= b <= max_b: exhaustive expectation equals the closed form
// exactly, and exhaustive variance is at most r(r-1)/b.
CheckReport check_balls_bins_lemmas(unsigned max_b = 6);

// Image-size moments under the k-wise polynomial family from [2^d] to
// [2^c] = [b] on the inputs {0..r-1}, versus the fully independent oracle.
struct KwiseBallsBins {
    unsigned d = 0, k = 0, r = 0, b = 0;
    Rational exact_mean_delta;   // |E' - E|
    Rational exact_var_delta;    // |Var' - Var|
    double eps_used = 0;         // comparison epsilon
    bool qualifies = false;      // k meets the independence threshold
    bool asserted = false;       // bounds checked (only when qualifying)
    bool pass = true;
};

KwiseBallsBins check_kwise_balls_bins(unsigned d, unsigned k, unsigned r, unsigned b,
                                      double eps = 0.1353352832366127);  // e^-2

// Exhaustive walk checks on the [m]^2 torus: the hitting bound
// (mu(1-lambda)+lambda)^|I| for every vertex subset and every position
// subset, the KL Chernoff bound exp(-l D(gamma || mu+lambda)) for every
// boolean vertex function on the integer threshold grid, and its weaker
// ln-form with the 2/e slack.
CheckReport check_tail_bounds(unsigned torus_m, unsigned max_l);

// Bernoulli KL divergence D(a || p), with the usual one-sided limits.
double kl_divergence(double a, double p);

struct DeviationMcResult {
    std::uint64_t walks = 0;
    std::uint64_t hits = 0;       // walks with sum f >= c1 * l
    double empirical = 0;
    double bound = 0;             // exp(-l)
    double slack = 0;             // 3 * sqrt(bound*(1-bound)/walks)
    double lambda_required = 0;   // exp(-l (ln l)^3)
    double lambda_achieved = 0;   // lambda0^power_t
    bool pass = false;
};

// Monte-Carlo rendering of the walk deviation bound on a powered torus
// small enough to sample quickly: f is a fixed vertex function whose tail
// satisfies P(f >= x) <= exp(-x (ln x)^3) for x >= 20 (any function bounded
// below 20 does), and the empirical tail of sum f over sampled walks is
// compared against exp(-l) plus binomial slack.
DeviationMcResult deviation_bound_mc(unsigned torus_m, unsigned l,
                                     std::uint64_t walks, std::uint64_t entropy_seed);

}  // namespace cardsketch
