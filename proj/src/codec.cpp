#include "cardsketch/codec.hpp"

#include <cstring>

#include "cardsketch/bitio.hpp"

namespace cardsketch {

namespace {

constexpr std::uint8_t kSketchMagic[4] = {'C', 'S', 'K', 'S'};
constexpr std::uint8_t kFileMagic[4] = {'C', 'S', 'K', '1'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kKindSeed = 1;
constexpr std::uint8_t kKindSketch = 2;

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }
    void raw(std::span<const std::uint8_t> bytes) {
        out_.insert(out_.end(), bytes.begin(), bytes.end());
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::size_t offset = 0)
        : bytes_(bytes), pos_(offset) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::span<const std::uint8_t> raw(std::size_t n) {
        need(n);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw DecodeError("file truncated");
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_;
};

std::uint64_t table_region_limit(const Params& p) {
    return (2ull * p.consts.c5_space + 1) * p.b * p.l;
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : data) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::vector<std::uint8_t> encode_sketch(const Sketch& s, const Params& p) {
    if (s.rows != p.l || s.bins != p.b) throw std::invalid_argument("sketch/params mismatch");
    if (s.q < 0) throw std::invalid_argument("negative cut-off");
    BitWriter bits;
    bits.put_gamma(static_cast<std::int64_t>(s.q) - 1);  // value q+1
    std::uint64_t table_bits = 0;
    for (std::int32_t v : s.table) {
        if (v < -1) throw std::invalid_argument("table entry below -1");
        table_bits += gamma_bit_length(v);
        bits.put_gamma(v);
    }
    if (table_bits > table_region_limit(p))
        throw std::invalid_argument("table region exceeds the serialized space bound");
    ByteWriter out;
    out.raw(kSketchMagic);
    out.u8(kVersion);
    out.u8(static_cast<std::uint8_t>(p.domain_bits));
    out.u32(s.rows);
    out.u32(s.bins);
    out.raw(bits.bytes());
    return out.take();
}

Sketch decode_sketch_at(std::span<const std::uint8_t> bytes, std::size_t& offset,
                        const Params& p) {
    ByteReader in(bytes, offset);
    if (std::memcmp(in.raw(4).data(), kSketchMagic, 4) != 0)
        throw DecodeError("bad sketch magic");
    if (in.u8() != kVersion) throw DecodeError("unsupported sketch version");
    if (in.u8() != p.domain_bits) throw DecodeError("universe bit width mismatch");
    Sketch s;
    s.rows = in.u32();
    s.bins = in.u32();
    if (s.rows != p.l || s.bins != p.b) throw DecodeError("sketch dimensions mismatch");
    BitReader bits(bytes.data() + in.pos(), bytes.size() - in.pos());
    const std::int64_t q = bits.get_gamma() + 1;
    if (q < 0 || q > static_cast<std::int64_t>(p.domain_bits))
        throw DecodeError("cut-off outside [0, ld n]");
    s.q = q;
    s.table.resize(static_cast<std::size_t>(s.rows) * s.bins);
    std::uint64_t table_bit_start = bits.bit_pos();
    for (auto& v : s.table) {
        std::int64_t x = bits.get_gamma();
        if (x > p.domain_bits) throw DecodeError("level above the hash range");
        v = x;
    }
    if (bits.bit_pos() - table_bit_start > table_region_limit(p))
        throw DecodeError("table region exceeds the serialized space bound");
    offset = in.pos() + (bits.bit_pos() + 7) / 8;
    return s;
}

Sketch decode_sketch(std::span<const std::uint8_t> bytes, const Params& p) {
    std::size_t offset = 0;
    Sketch s = decode_sketch_at(bytes, offset, p);
    if (offset != bytes.size()) throw DecodeError("trailing bytes after sketch");
    return s;
}

namespace {

void put_coeffs(ByteWriter& out, const std::vector<std::uint64_t>& coeffs, unsigned d) {
    const unsigned nbytes = (d + 7) / 8;
    for (std::uint64_t c : coeffs)
        for (unsigned i = 0; i < nbytes; ++i)
            out.u8(static_cast<std::uint8_t>(c >> (8 * i)));
}

std::vector<std::uint64_t> get_coeffs(ByteReader& in, unsigned k, unsigned d) {
    const unsigned nbytes = (d + 7) / 8;
    std::vector<std::uint64_t> coeffs(k, 0);
    for (auto& c : coeffs)
        for (unsigned i = 0; i < nbytes; ++i)
            c |= static_cast<std::uint64_t>(in.u8()) << (8 * i);
    return coeffs;
}

}  // namespace

std::vector<std::uint8_t> encode_kwise_seed(const KWiseHash& h) {
    ByteWriter out;
    out.u32(h.k);
    out.u8(static_cast<std::uint8_t>(h.d));
    out.u8(static_cast<std::uint8_t>(h.out_bits));
    put_coeffs(out, h.coeffs, h.d);
    return out.take();
}

KWiseHash decode_kwise_seed(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    KWiseHash h;
    h.k = in.u32();
    h.d = in.u8();
    h.out_bits = in.u8();
    if (h.d < 1 || h.d > 64 || h.out_bits > h.d) throw DecodeError("bad hash header");
    h.coeffs = get_coeffs(in, h.k, h.d);
    return h;
}

std::vector<std::uint8_t> encode_geometric_seed(const GeometricHash& g) {
    ByteWriter out;
    out.u32(g.k);
    out.u8(static_cast<std::uint8_t>(g.d));
    put_coeffs(out, g.coeffs, g.d);
    return out.take();
}

GeometricHash decode_geometric_seed(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    GeometricHash g;
    g.k = in.u32();
    g.d = in.u8();
    if (g.d < 1 || g.d > 64) throw DecodeError("bad hash header");
    g.coeffs = get_coeffs(in, g.k, g.d);
    return g;
}

std::vector<std::uint8_t> encode_walk_seed(const WalkSeed& seed) {
    ByteWriter out;
    std::vector<std::uint8_t> start = nat_to_bytes_be(seed.start);
    out.u32(static_cast<std::uint32_t>(start.size()));
    out.raw(start);
    out.u32(static_cast<std::uint32_t>(seed.steps.size()));
    BitWriter bits;
    for (std::uint8_t lab : seed.steps) bits.put_bits(lab, 3);
    out.raw(bits.bytes());
    return out.take();
}

WalkSeed decode_walk_seed(std::span<const std::uint8_t> bytes, const WalkSpace& ws) {
    ByteReader in(bytes);
    WalkSeed seed;
    const std::uint32_t start_len = in.u32();
    auto start_bytes = in.raw(start_len);
    seed.start = nat_from_bytes_be(start_bytes.data(), start_bytes.size());
    const std::uint32_t nsteps = in.u32();
    if (nsteps != ws.step_count()) throw DecodeError("walk step count mismatch");
    const std::size_t packed = (static_cast<std::size_t>(nsteps) * 3 + 7) / 8;
    auto label_bytes = in.raw(packed);
    BitReader bits(label_bytes.data(), label_bytes.size());
    seed.steps.resize(nsteps);
    for (auto& lab : seed.steps) lab = static_cast<std::uint8_t>(bits.get_bits(3));
    if (seed.start >= ws.vertex_count) throw DecodeError("walk start out of range");
    return seed;
}

namespace {

void write_param_header(ByteWriter& out, std::uint8_t kind, const OuterParams& op,
                        std::uint64_t seed_id) {
    const Params& p = op.inner;
    out.raw(kFileMagic);
    out.u8(kVersion);
    out.u8(kind);
    out.u8(static_cast<std::uint8_t>(p.profile));
    out.u8(static_cast<std::uint8_t>(p.domain_bits));
    out.u64(p.n);
    out.f64(p.eps);
    out.f64(op.delta);
    out.u64(p.c6_practical);
    out.u32(op.m);
    out.u64(seed_id);
}

OuterParams read_param_header(ByteReader& in, std::uint8_t expected_kind,
                              std::uint64_t& seed_id) {
    if (std::memcmp(in.raw(4).data(), kFileMagic, 4) != 0)
        throw DecodeError("bad file magic");
    if (in.u8() != kVersion) throw DecodeError("unsupported file version");
    if (in.u8() != expected_kind) throw DecodeError("unexpected file kind");
    const std::uint8_t profile_byte = in.u8();
    if (profile_byte > 1) throw DecodeError("bad profile byte");
    const std::uint8_t nbits = in.u8();
    const std::uint64_t n = in.u64();
    const double eps = in.f64();
    const double delta = in.f64();
    const std::uint64_t c6p = in.u64();
    const std::uint32_t m = in.u32();
    seed_id = in.u64();
    OuterParams op;
    try {
        op = plan(n, eps, delta, static_cast<Profile>(profile_byte),
                  c6p == 0 ? kDefaultC6Practical : c6p);
    } catch (const ParamError& e) {
        throw DecodeError(std::string("file parameters invalid: ") + e.what());
    }
    if (op.m != m) throw DecodeError("repetition count disagrees with parameters");
    if (op.inner.domain_bits != nbits) throw DecodeError("universe bit width mismatch");
    return op;
}

}  // namespace

std::vector<std::uint8_t> encode_seed_file(const OuterParams& op, const SeedTheta& seed) {
    std::vector<std::uint8_t> payload = encode_walk_seed(seed.walk);
    ByteWriter out;
    write_param_header(out, kKindSeed, op, fnv1a64(payload));
    out.raw(payload);
    return out.take();
}

LoadedSeed decode_seed_file(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    LoadedSeed loaded;
    loaded.plan = read_param_header(in, kKindSeed, loaded.seed_id);
    auto payload = in.raw(in.remaining());
    if (fnv1a64(payload) != loaded.seed_id) throw DecodeError("seed fingerprint mismatch");
    WalkSeed walk = decode_walk_seed(payload, theta_walk_space(loaded.plan));
    loaded.seed = seed_theta_from_walk(loaded.plan, std::move(walk));
    return loaded;
}

std::vector<std::uint8_t> encode_sketch_file(const OuterParams& op,
                                             std::uint64_t seed_id,
                                             const VectorSketch& d) {
    if (d.parts.size() != op.m) throw std::invalid_argument("vector sketch length mismatch");
    ByteWriter out;
    write_param_header(out, kKindSketch, op, seed_id);
    for (const Sketch& s : d.parts) out.raw(encode_sketch(s, op.inner));
    return out.take();
}

LoadedSketch decode_sketch_file(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    LoadedSketch loaded;
    loaded.plan = read_param_header(in, kKindSketch, loaded.seed_id);
    std::size_t offset = in.pos();
    for (unsigned i = 0; i < loaded.plan.m; ++i)
        loaded.sketch.parts.push_back(decode_sketch_at(bytes, offset, loaded.plan.inner));
    if (offset != bytes.size()) throw DecodeError("trailing bytes after sketch file");
    return loaded;
}

}  // namespace cardsketch
