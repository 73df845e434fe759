#include "cardsketch/params.hpp"

#include <cmath>

#include "cardsketch/gf2.hpp"

namespace cardsketch {

Constants default_constants() {
    const double e = std::exp(1.0);
    Constants c;
    c.c1_dev_bound = e * e + e * e * e + (e - 1.0);
    c.c2_eps = 4;
    c.c3_bin_balls = 15.0 / 2.0;
    c.c4_bin_balls = 16;
    c.c5_space = 33;
    c.c6_delta = std::uint64_t{9} << 23;
    c.c7_pre_bins = 32;
    return c;
}

namespace {

unsigned ceil_log2_u64(std::uint64_t n) {
    unsigned bits = 0;
    while ((std::uint64_t{1} << bits) < n) {
        ++bits;
        if (bits == 64) break;  // n > 2^63: needs all 64 bits
    }
    return bits;
}

}  // namespace

Params derive_params(std::uint64_t n, double eps, double delta, Profile profile,
                     std::uint64_t c6_practical) {
    if (n < 2) throw ParamError("universe size must be at least 2");
    if (!(eps > 0.0 && eps <= 1.0)) throw ParamError("eps must be in (0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw ParamError("delta must be in (0,1)");
    if (profile == Profile::practical && c6_practical < 1)
        throw ParamError("c6_practical must be positive");

    Params p;
    p.n = n;
    p.eps = eps;
    p.delta = delta;
    p.profile = profile;
    p.c6_practical = profile == Profile::practical ? c6_practical : 0;
    p.consts = default_constants();

    p.l = static_cast<unsigned>(
        std::ceil(p.consts.c2_eps * std::log(2.0 / delta)));

    const double c6 = profile == Profile::strict
                          ? static_cast<double>(p.consts.c6_delta)
                          : static_cast<double>(c6_practical);
    const double ld_target = std::log2(c6 / (eps * eps));
    p.bin_bits = static_cast<unsigned>(std::ceil(ld_target));
    if (p.bin_bits >= 63) throw ParamError("bin count overflows 64-bit range");
    p.b = std::uint64_t{1} << p.bin_bits;

    p.k = static_cast<unsigned>(std::ceil(
        p.consts.c3_bin_balls * std::log(static_cast<double>(p.b)) +
        p.consts.c4_bin_balls));

    const double lnl = p.l >= 2 ? std::log(static_cast<double>(p.l)) : 0.0;
    p.ln_lambda = std::min(-std::log(16.0), -static_cast<double>(p.l) * lnl * lnl * lnl);

    p.domain_bits = ceil_log2_u64(n);
    if (p.domain_bits == 0) p.domain_bits = 1;
    p.pre_bin_bits = 5 + 2 * p.bin_bits;  // c7 * b^2 with c7 = 2^5
    p.g_bits = std::max(p.domain_bits, p.pre_bin_bits);
    if (p.g_bits > gf2::kMaxDegree)
        throw ParamError("hash domain exceeds 64 bits; configuration unsupported");
    return p;
}

bool outer_applicable(std::uint64_t n, double delta) {
    return delta < 1.0 / std::log(static_cast<double>(n));
}

OuterParams derive_outer_params(std::uint64_t n, double eps, double delta,
                                Profile profile, std::uint64_t c6_practical) {
    if (n < 2) throw ParamError("universe size must be at least 2");
    if (!(delta > 0.0 && delta < 1.0)) throw ParamError("delta must be in (0,1)");
    if (!outer_applicable(n, delta))
        throw ParamError("repetition layer applies only for delta < 1/ln(n)");

    const double ln_n = std::log(static_cast<double>(n));
    const double delta_star = 1.0 / ln_n;
    OuterParams op;
    op.inner = derive_params(n, eps, delta_star, profile, c6_practical);
    op.m = static_cast<unsigned>(
        std::ceil(4.0 * std::log(1.0 / delta) / std::log(ln_n)));
    op.lambda_outer = delta_star;
    op.delta = delta;
    return op;
}

OuterParams plan(std::uint64_t n, double eps, double delta, Profile profile,
                 std::uint64_t c6_practical) {
    if (outer_applicable(n, delta))
        return derive_outer_params(n, eps, delta, profile, c6_practical);
    OuterParams op;
    op.inner = derive_params(n, eps, delta, profile, c6_practical);
    op.m = 1;
    op.lambda_outer = delta;
    op.delta = delta;
    return op;
}

}  // namespace cardsketch
