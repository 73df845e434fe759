#include "cardsketch/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "cardsketch/gf2.hpp"

namespace cardsketch {

GeometricFamily level_family(const Params& p) { return {2, p.domain_bits}; }

KWiseFamily collision_family(const Params& p) { return {2, p.g_bits, p.pre_bin_bits}; }

KWiseFamily bin_family(const Params& p) { return {p.k, p.pre_bin_bits, p.bin_bits}; }

std::size_t psi_bits(const Params& p) {
    return seed_bits(level_family(p)) + seed_bits(collision_family(p)) +
           seed_bits(bin_family(p));
}

Nat psi_size(const Params& p) { return Nat{1} << psi_bits(p); }

HashTriple triple_from_index(const Params& p, const Nat& idx) {
    if (idx < 0 || idx >= psi_size(p)) throw std::invalid_argument("triple index out of range");
    const std::size_t hb = seed_bits(bin_family(p));
    const std::size_t gb = seed_bits(collision_family(p));
    Nat rest = idx;
    Nat h_idx = rest & ((Nat{1} << hb) - 1);
    rest >>= hb;
    Nat g_idx = rest & ((Nat{1} << gb) - 1);
    rest >>= gb;
    HashTriple t;
    t.f = seed_from_index(level_family(p), rest);
    t.g = seed_from_index(collision_family(p), g_idx);
    t.h = seed_from_index(bin_family(p), h_idx);
    return t;
}

Nat index_of_triple(const Params& p, const HashTriple& t) {
    Nat idx = index_of_seed(t.f);
    idx <<= seed_bits(collision_family(p));
    idx |= index_of_seed(t.g);
    idx <<= seed_bits(bin_family(p));
    idx |= index_of_seed(t.h);
    return idx;
}

unsigned RowHasher::level(std::uint64_t x) const {
    std::uint64_t v = gf2::mul_raw(f1, x, fd, fred) ^ f0;
    if (v == 0) return fd;
    return static_cast<unsigned>(std::countr_zero(v));
}

std::uint32_t RowHasher::bin(std::uint64_t x) const {
    std::uint64_t z = (gf2::mul_raw(g1, x, gd, gred) ^ g0) & pre_mask;
    std::uint64_t acc = h.back();
    for (std::size_t i = h.size() - 1; i-- > 0;)
        acc = gf2::mul_raw(acc, z, hd, hred) ^ h[i];
    return static_cast<std::uint32_t>(acc & bin_mask);
}

RowHasher make_row_hasher(const HashTriple& t, const Params& p) {
    RowHasher r;
    r.f0 = t.f.coeffs[0];
    r.f1 = t.f.coeffs[1];
    r.g0 = t.g.coeffs[0];
    r.g1 = t.g.coeffs[1];
    r.fd = p.domain_bits;
    r.gd = p.g_bits;
    r.hd = p.pre_bin_bits;
    r.fred = gf2::reduction_low(r.fd);
    r.gred = gf2::reduction_low(r.gd);
    r.hred = gf2::reduction_low(r.hd);
    r.pre_mask = p.pre_bin_bits == 64 ? ~std::uint64_t{0}
                                      : (std::uint64_t{1} << p.pre_bin_bits) - 1;
    r.bin_mask = p.b - 1;
    r.h = t.h.coeffs;
    return r;
}

RowBlockHasher::RowBlockHasher(std::span<const RowHasher> rows, const Params& p) {
    nrows_ = static_cast<unsigned>(rows.size());
    k_ = p.k;
    fd_ = p.domain_bits;
    gd_ = p.g_bits;
    hd_ = p.pre_bin_bits;
    fred_ = gf2::reduction_low(fd_);
    gred_ = gf2::reduction_low(gd_);
    hred_ = gf2::reduction_low(hd_);
    pre_mask_ = hd_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << hd_) - 1;
    bin_mask_ = p.b - 1;
    f0_.resize(nrows_);
    f1_.resize(nrows_);
    g0_.resize(nrows_);
    g1_.resize(nrows_);
    hc_.resize(static_cast<std::size_t>(k_) * nrows_);
    for (unsigned r = 0; r < nrows_; ++r) {
        const RowHasher& rh = rows[r];
        if (rh.h.size() != k_) throw std::invalid_argument("row hasher arity mismatch");
        f0_[r] = rh.f0;
        f1_[r] = rh.f1;
        g0_[r] = rh.g0;
        g1_[r] = rh.g1;
        for (unsigned j = 0; j < k_; ++j) hc_[static_cast<std::size_t>(j) * nrows_ + r] = rh.h[j];
    }
    acc_.resize(nrows_);
    z_.resize(nrows_);
}

#if defined(CARDSKETCH_HAVE_PCLMUL)
namespace {

// One multiply in GF(2^d) staying in SSE registers; two reduction folds
// suffice for 16 <= d <= 32 since every tabulated polynomial has low
// degree at most 7 there.
inline std::uint64_t mul_sse_32(std::uint64_t a, std::uint64_t b, unsigned d,
                                __m128i vlow, __m128i vmask) {
    __m128i va = _mm_set_epi64x(static_cast<long long>(b), static_cast<long long>(a));
    __m128i p = _mm_clmulepi64_si128(va, va, 0x10);
    __m128i h1 = _mm_srli_epi64(p, static_cast<int>(d));
    p = _mm_xor_si128(_mm_and_si128(p, vmask), _mm_clmulepi64_si128(h1, vlow, 0x00));
    __m128i h2 = _mm_srli_epi64(p, static_cast<int>(d));
    p = _mm_xor_si128(_mm_and_si128(p, vmask), _mm_clmulepi64_si128(h2, vlow, 0x00));
    return static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
}

inline bool sse_path_ok(unsigned d) { return d >= 16 && d <= 32; }

}  // namespace
#endif

void RowBlockHasher::eval(std::uint64_t x, std::uint32_t* bins,
                          std::uint8_t* levels) const {
    std::uint64_t* acc = acc_.data();
    std::uint64_t* z = z_.data();
#if defined(CARDSKETCH_HAVE_PCLMUL)
    if (sse_path_ok(fd_) && sse_path_ok(gd_) && sse_path_ok(hd_)) {
        const __m128i flow = _mm_set_epi64x(0, static_cast<long long>(fred_));
        const __m128i fmask = _mm_set1_epi64x(
            static_cast<long long>((std::uint64_t{1} << fd_) - 1));
        const __m128i glow = _mm_set_epi64x(0, static_cast<long long>(gred_));
        const __m128i gmask = _mm_set1_epi64x(
            static_cast<long long>((std::uint64_t{1} << gd_) - 1));
        const __m128i hlow = _mm_set_epi64x(0, static_cast<long long>(hred_));
        const __m128i hmask = _mm_set1_epi64x(
            static_cast<long long>((std::uint64_t{1} << hd_) - 1));
        for (unsigned r = 0; r < nrows_; ++r) {
            std::uint64_t fv = mul_sse_32(f1_[r], x, fd_, flow, fmask) ^ f0_[r];
            levels[r] = static_cast<std::uint8_t>(
                fv == 0 ? fd_ : static_cast<unsigned>(std::countr_zero(fv)));
            z[r] = (mul_sse_32(g1_[r], x, gd_, glow, gmask) ^ g0_[r]) & pre_mask_;
        }
        const std::uint64_t* top = hc_.data() + static_cast<std::size_t>(k_ - 1) * nrows_;
        for (unsigned r = 0; r < nrows_; ++r) acc[r] = top[r];
        for (unsigned j = k_ - 1; j-- > 0;) {
            const std::uint64_t* cj = hc_.data() + static_cast<std::size_t>(j) * nrows_;
            for (unsigned r = 0; r < nrows_; ++r)
                acc[r] = mul_sse_32(acc[r], z[r], hd_, hlow, hmask) ^ cj[r];
        }
        for (unsigned r = 0; r < nrows_; ++r)
            bins[r] = static_cast<std::uint32_t>(acc[r] & bin_mask_);
        return;
    }
#endif
    for (unsigned r = 0; r < nrows_; ++r) {
        std::uint64_t fv = gf2::mul_raw(f1_[r], x, fd_, fred_) ^ f0_[r];
        levels[r] = static_cast<std::uint8_t>(
            fv == 0 ? fd_ : static_cast<unsigned>(std::countr_zero(fv)));
        z[r] = (gf2::mul_raw(g1_[r], x, gd_, gred_) ^ g0_[r]) & pre_mask_;
        acc[r] = hc_[static_cast<std::size_t>(k_ - 1) * nrows_ + r];
    }
    for (unsigned j = k_ - 1; j-- > 0;) {
        const std::uint64_t* cj = hc_.data() + static_cast<std::size_t>(j) * nrows_;
        for (unsigned r = 0; r < nrows_; ++r)
            acc[r] = gf2::mul_raw(acc[r], z[r], hd_, hred_) ^ cj[r];
    }
    for (unsigned r = 0; r < nrows_; ++r)
        bins[r] = static_cast<std::uint32_t>(acc[r] & bin_mask_);
}

WalkSpace omega_walk_space(const Params& p) {
    return make_walk_space(psi_size(p), p.ln_lambda, p.l);
}

SeedOmega seed_omega_from_walk(const Params& p, WalkSeed walk) {
    SeedOmega seed;
    seed.walk = std::move(walk);
    std::vector<Nat> vertices = walk_from_seed(omega_walk_space(p), seed.walk);
    seed.rows.reserve(vertices.size());
    seed.hashers.reserve(vertices.size());
    for (const Nat& v : vertices) {
        seed.rows.push_back(triple_from_index(p, v));
        seed.hashers.push_back(make_row_hasher(seed.rows.back(), p));
    }
    return seed;
}

SeedOmega init(const Params& p, BitSource& entropy) {
    return seed_omega_from_walk(p, sample_walk(omega_walk_space(p), entropy));
}

Sketch empty_sketch(const Params& p) {
    Sketch s;
    s.rows = p.l;
    s.bins = static_cast<std::uint32_t>(p.b);
    s.q = 0;
    s.table.assign(static_cast<std::size_t>(p.l) * p.b, -1);
    return s;
}

std::uint64_t table_space_bits(std::span<const std::int64_t> table) {
    std::uint64_t sum = 0;
    for (std::int64_t v : table) {
        if (v < -1) throw std::invalid_argument("table entry below -1");
        sum += std::bit_width(static_cast<std::uint64_t>(v + 2)) - 1;
    }
    return sum;
}

std::vector<std::uint32_t> cutoff_chi(std::span<const std::int64_t> table) {
    std::int64_t max_x = 2;
    for (std::int64_t v : table) max_x = std::max<std::int64_t>(max_x, v + 2);
    if (max_x > (1 << 22)) throw std::invalid_argument("entries too large for dense chi");
    std::vector<std::uint32_t> chi(static_cast<std::size_t>(max_x) + 1, 0);
    for (std::int64_t v : table) {
        const std::uint64_t x = static_cast<std::uint64_t>(v + 2);
        const unsigned lg = std::bit_width(x) - 1;  // floor(ld x)
        for (unsigned k = 1; k <= lg; ++k)
            chi[x - ((std::uint64_t{1} << k) - 1)] += 1;
    }
    return chi;
}

std::int64_t find_required_cutoff(std::span<const std::int64_t> table, const Params& p) {
    const std::uint64_t budget =
        static_cast<std::uint64_t>(p.consts.c5_space) * p.b * p.l;
    const std::uint64_t used = table_space_bits(table);
    if (used <= budget) return 0;
    const std::uint64_t excess = used - budget;
    // sparse chi: one event per unit increment, at position x - (2^k - 1)
    std::vector<std::int64_t> events;
    events.reserve(excess);
    for (std::int64_t v : table) {
        const std::uint64_t x = static_cast<std::uint64_t>(v + 2);
        const unsigned lg = std::bit_width(x) - 1;
        for (unsigned k = 1; k <= lg; ++k)
            events.push_back(static_cast<std::int64_t>(x - ((std::uint64_t{1} << k) - 1)));
    }
    // the shortest prefix of chi with sum >= excess ends at the excess-th
    // smallest event position
    auto nth = events.begin() + static_cast<std::ptrdiff_t>(excess - 1);
    std::nth_element(events.begin(), nth, events.end());
    return *nth;
}

Sketch compress(Sketch s, const Params& p) {
    const std::int64_t delta = find_required_cutoff(s.table, p);
    if (delta == 0) return s;
    for (std::int64_t& v : s.table) v = std::max<std::int64_t>(v - delta, -1);
    s.q += delta;
    return s;
}

Sketch single(std::uint64_t x, const SeedOmega& seed, const Params& p) {
    if (x >= p.n) throw std::invalid_argument("element outside universe");
    if (seed.hashers.size() != p.l) throw std::invalid_argument("seed/params mismatch");
    Sketch s = empty_sketch(p);
    for (unsigned i = 0; i < p.l; ++i) {
        const RowHasher& rh = seed.hashers[i];
        s.table[static_cast<std::size_t>(i) * s.bins + rh.bin(x)] =
            static_cast<std::int64_t>(rh.level(x));
    }
    return compress(std::move(s), p);
}

Sketch merge(const Sketch& a, const Sketch& b, const Params& p) {
    if (a.rows != b.rows || a.bins != b.bins)
        throw std::invalid_argument("sketch dimensions mismatch");
    if (a.rows != p.l || a.bins != p.b)
        throw std::invalid_argument("sketch/params mismatch");
    Sketch out;
    out.rows = a.rows;
    out.bins = a.bins;
    out.q = std::max(a.q, b.q);
    out.table.resize(a.table.size());
    const std::int64_t da = a.q - out.q;
    const std::int64_t db = b.q - out.q;
    for (std::size_t idx = 0; idx < a.table.size(); ++idx)
        out.table[idx] = std::max(a.table[idx] + da, b.table[idx] + db);
    return compress(std::move(out), p);
}

double rho(double r, double b) { return b * (1.0 - std::pow(1.0 - 1.0 / b, r)); }

double rho_inverse(double hit_bins, double b) {
    return std::log1p(-hit_bins / b) / std::log1p(-1.0 / b);
}

std::vector<RowEstimate> row_estimates(const Sketch& s, const Params& p) {
    if (s.rows != p.l || s.bins != p.b) throw std::invalid_argument("sketch/params mismatch");
    std::vector<RowEstimate> out(s.rows);
    const std::int64_t ld_b = static_cast<std::int64_t>(p.bin_bits);
    for (unsigned i = 0; i < s.rows; ++i) {
        const std::int64_t* row = s.table.data() + static_cast<std::size_t>(i) * s.bins;
        std::int64_t mx = -1;
        for (unsigned j = 0; j < s.bins; ++j) mx = std::max(mx, row[j]);
        const std::int64_t sub = std::max(std::int64_t{0}, mx + s.q - ld_b + 9);
        std::uint64_t hit = 0;
        for (unsigned j = 0; j < s.bins; ++j)
            hit += (row[j] + s.q >= sub);
        RowEstimate re;
        if (hit == s.bins) {
            // All bins at or above the threshold; the inversion would be
            // -inf, so clamp to b-1 and report the row as saturated.
            hit = s.bins - 1;
            re.saturated = true;
        }
        re.y = std::exp2(static_cast<double>(sub)) *
               rho_inverse(static_cast<double>(hit), static_cast<double>(s.bins));
        out[i] = re;
    }
    return out;
}

double lower_median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty list");
    const std::size_t idx = (values.size() - 1) / 2;
    std::nth_element(values.begin(), values.begin() + idx, values.end());
    return values[idx];
}

double estimate(const Sketch& s, const Params& p) {
    std::vector<RowEstimate> rows = row_estimates(s, p);
    std::vector<double> ys(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) ys[i] = rows[i].y;
    return lower_median(std::move(ys));
}

Sketch tau_oracle(const SeedOmega& seed, std::span<const std::uint64_t> elements,
                  const Params& p) {
    if (elements.empty())
        throw std::invalid_argument("tau is defined for non-empty sets only");
    if (seed.hashers.size() != p.l) throw std::invalid_argument("seed/params mismatch");
    // per-bin maxima of the level hash (the uncompressed state)
    std::vector<std::int64_t> raw(static_cast<std::size_t>(p.l) * p.b, -1);
    for (std::uint64_t x : elements) {
        if (x >= p.n) throw std::invalid_argument("element outside universe");
        for (unsigned i = 0; i < p.l; ++i) {
            const RowHasher& rh = seed.hashers[i];
            std::int64_t& slot = raw[static_cast<std::size_t>(i) * p.b + rh.bin(x)];
            slot = std::max(slot, static_cast<std::int64_t>(rh.level(x)));
        }
    }
    const std::uint64_t budget =
        static_cast<std::uint64_t>(p.consts.c5_space) * p.b * p.l;
    std::vector<std::int64_t> shifted = raw;
    std::int64_t q = 0;
    while (table_space_bits(shifted) > budget) {
        ++q;
        for (std::size_t idx = 0; idx < shifted.size(); ++idx)
            shifted[idx] = std::max<std::int64_t>(raw[idx] - q, -1);
    }
    Sketch s;
    s.rows = p.l;
    s.bins = static_cast<std::uint32_t>(p.b);
    s.q = q;
    s.table = std::move(shifted);
    return s;
}

}  // namespace cardsketch
