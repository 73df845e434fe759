#include "cardsketch/hash_family.hpp"

#include <bit>
#include <stdexcept>

#include "cardsketch/gf2.hpp"

namespace cardsketch {

namespace {

void check_domain(std::uint64_t x, unsigned d) {
    if (d < 1 || d > gf2::kMaxDegree) throw std::invalid_argument("bad hash degree");
    if (d < 64 && (x >> d) != 0) throw std::invalid_argument("hash input outside domain");
}

std::vector<std::uint64_t> slice_coeffs(const Nat& idx, unsigned k, unsigned d) {
    Nat total = Nat{1} << (static_cast<std::size_t>(k) * d);
    if (idx < 0 || idx >= total) throw std::invalid_argument("seed index out of range");
    std::vector<std::uint64_t> coeffs(k);
    Nat rest = idx;
    const Nat mask = (Nat{1} << d) - 1;
    for (unsigned i = 0; i < k; ++i) {
        coeffs[i] = static_cast<std::uint64_t>(rest & mask);
        rest >>= d;
    }
    return coeffs;
}

Nat join_coeffs(const std::vector<std::uint64_t>& coeffs, unsigned d) {
    Nat idx = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
        idx <<= d;
        idx |= coeffs[i];
    }
    return idx;
}

}  // namespace

std::uint64_t kwise_eval(const KWiseHash& h, std::uint64_t x) {
    check_domain(x, h.d);
    if (h.out_bits > h.d) throw std::invalid_argument("output bits exceed degree");
    std::uint64_t v = gf2::eval_poly_raw(h.coeffs, x, h.d);
    // range reduction [2^d] -> [2^c]: keep the low c bits
    if (h.out_bits == 64) return v;
    return v & ((std::uint64_t{1} << h.out_bits) - 1);
}

unsigned geom_eval(const GeometricHash& g, std::uint64_t x) {
    check_domain(x, g.d);
    std::uint64_t v = gf2::eval_poly_raw(g.coeffs, x, g.d);
    if (v == 0) return g.d;
    return static_cast<unsigned>(std::countr_zero(v));
}

KWiseHash seed_from_index(const KWiseFamily& f, const Nat& idx) {
    KWiseHash h;
    h.k = f.k;
    h.d = f.d;
    h.out_bits = f.out_bits;
    h.coeffs = slice_coeffs(idx, f.k, f.d);
    return h;
}

GeometricHash seed_from_index(const GeometricFamily& f, const Nat& idx) {
    GeometricHash g;
    g.k = f.k;
    g.d = f.d;
    g.coeffs = slice_coeffs(idx, f.k, f.d);
    return g;
}

Nat index_of_seed(const KWiseHash& h) { return join_coeffs(h.coeffs, h.d); }

Nat index_of_seed(const GeometricHash& g) { return join_coeffs(g.coeffs, g.d); }

}  // namespace cardsketch
