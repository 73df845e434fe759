#pragma once

#include <cstdint>
#include <stdexcept>

namespace cardsketch {

enum class Profile : std::uint8_t { strict = 0, practical = 1 };

struct ParamError : std::invalid_argument {
    explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

// Fixed constants of the algorithm.
struct Constants {
    double c1_dev_bound;        // e^2 + e^3 + (e - 1), walk deviation bound
    unsigned c2_eps;            // 4, repetition scale for the row count
    double c3_bin_balls;        // 15/2, bin-hash independence slope
    unsigned c4_bin_balls;      // 16, bin-hash independence offset
    unsigned c5_space;          // 33, per-bin space budget; >= ceil(c1 + 3)
    std::uint64_t c6_delta;     // 9 * 2^23, bin count scale
    unsigned c7_pre_bins;       // 32, pre-bin domain scale

    bool operator==(const Constants&) const = default;
};

Constants default_constants();

inline constexpr std::uint64_t kDefaultC6Practical = 64;

// All derived parameters for one inner sketch.
struct Params {
    std::uint64_t n = 0;      // universe is [n]
    double eps = 0;
    double delta = 0;
    Profile profile = Profile::practical;
    std::uint64_t c6_practical = kDefaultC6Practical;  // replaces c6_delta in practical profile

    unsigned l = 0;           // rows per sketch
    std::uint64_t b = 0;      // bins per row, power of two
    unsigned k = 0;           // independence of the bin hash
    double ln_lambda = 0;     // ln of the walk spectral bound; exp() of it
                              // underflows double for realistic l, so the
                              // log is the carried representation
    unsigned domain_bits = 0;   // ceil(ld n); field degree of the level hash
    unsigned bin_bits = 0;      // ld b
    unsigned pre_bin_bits = 0;  // ld(c7 * b^2), range bits of the collision hash
    unsigned g_bits = 0;        // field degree of the collision hash:
                                // max(domain_bits, pre_bin_bits)
    Constants consts{};

    bool operator==(const Params&) const = default;
};

// Derives every parameter from (n, eps, delta). Deterministic; rejects
// out-of-domain inputs and configurations whose hash domains exceed 64 bits.
Params derive_params(std::uint64_t n, double eps, double delta, Profile profile,
                     std::uint64_t c6_practical = kDefaultC6Practical);

// Repetition layer dimensions for failure probabilities below (ln n)^-1.
struct OuterParams {
    Params inner;           // built with delta* = (ln n)^-1 when m > 1
    unsigned m = 1;         // repetition count; 1 means the inner sketch alone
    double lambda_outer = 0;  // spectral bound of the repetition walk (= delta*)
    double delta = 0;       // requested overall failure probability

    bool operator==(const OuterParams&) const = default;
};

bool outer_applicable(std::uint64_t n, double delta);

// Requires delta < (ln n)^-1; the single-sketch regime is a domain error here.
OuterParams derive_outer_params(std::uint64_t n, double eps, double delta,
                                Profile profile,
                                std::uint64_t c6_practical = kDefaultC6Practical);

// Public dispatch: the repetition layer is engaged exactly when
// delta < (ln n)^-1, otherwise the result wraps a single inner sketch (m = 1).
OuterParams plan(std::uint64_t n, double eps, double delta, Profile profile,
                 std::uint64_t c6_practical = kDefaultC6Practical);

}  // namespace cardsketch
