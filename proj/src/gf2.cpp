#include "cardsketch/gf2.hpp"

#include <vector>

namespace cardsketch::gf2 {

namespace {

// Low part of x^d + low, lexicographically least irreducible, d = 1..64.
constexpr std::uint64_t kReductionLow[64] = {
    0x00, 0x03, 0x03, 0x03, 0x05, 0x03, 0x03, 0x1b,  // d=1..8
    0x03, 0x09, 0x05, 0x09, 0x1b, 0x21, 0x03, 0x2b,  // d=9..16
    0x09, 0x09, 0x27, 0x09, 0x05, 0x03, 0x21, 0x1b,  // d=17..24
    0x09, 0x1b, 0x27, 0x03, 0x05, 0x03, 0x09, 0x8d,  // d=25..32
    0x4b, 0x1b, 0x05, 0x35, 0x3f, 0x63, 0x11, 0x39,  // d=33..40
    0x09, 0x27, 0x59, 0x21, 0x1b, 0x03, 0x21, 0x2d,  // d=41..48
    0x71, 0x1d, 0x4b, 0x09, 0x47, 0x7d, 0x47, 0x95,  // d=49..56
    0x11, 0x63, 0x7b, 0x03, 0x27, 0x69, 0x03, 0x1b,  // d=57..64
};

void check_degree(unsigned d) {
    if (d < 1 || d > kMaxDegree) throw std::invalid_argument("field degree out of range");
}

void check_same_degree(FieldElem a, FieldElem b) {
    check_degree(a.d);
    if (a.d != b.d) throw std::invalid_argument("mismatched field degrees");
}

void check_in_field(FieldElem a) {
    if (a.d < 64 && (a.bits >> a.d) != 0)
        throw std::invalid_argument("element bits exceed field degree");
}

}  // namespace

std::uint64_t reduction_low(unsigned d) {
    check_degree(d);
    return kReductionLow[d - 1];
}

std::uint64_t eval_poly_raw(std::span<const std::uint64_t> coeffs, std::uint64_t x,
                            unsigned d) {
    if (coeffs.empty()) return 0;
    const std::uint64_t low = reduction_low(d);
    std::uint64_t acc = coeffs.back();
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
        acc = mul_raw(acc, x, d, low) ^ coeffs[i];
    }
    return acc;
}

FieldElem add(FieldElem a, FieldElem b) {
    check_same_degree(a, b);
    check_in_field(a);
    check_in_field(b);
    return {a.bits ^ b.bits, a.d};
}

FieldElem mul(FieldElem a, FieldElem b) {
    check_same_degree(a, b);
    check_in_field(a);
    check_in_field(b);
    return {mul_raw(a.bits, b.bits, a.d), a.d};
}

FieldElem eval_poly(std::span<const FieldElem> coeffs, FieldElem x) {
    check_in_field(x);
    check_degree(x.d);
    std::vector<std::uint64_t> raw;
    raw.reserve(coeffs.size());
    for (const FieldElem& c : coeffs) {
        check_same_degree(c, x);
        check_in_field(c);
        raw.push_back(c.bits);
    }
    return {eval_poly_raw(raw, x.bits, x.d), x.d};
}

}  // namespace cardsketch::gf2
