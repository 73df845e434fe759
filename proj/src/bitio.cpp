#include "cardsketch/bitio.hpp"

namespace cardsketch {

void BitWriter::put_bit(bool b) {
    unsigned off = nbits_ % 8;
    if (off == 0) bytes_.push_back(0);
    if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> off);
    ++nbits_;
}

void BitWriter::put_bits(std::uint64_t v, unsigned n) {
    for (unsigned i = n; i-- > 0;) put_bit((v >> i) & 1);
}

void BitWriter::put_gamma(std::int64_t x) {
    if (x < -1) throw std::invalid_argument("gamma code requires x >= -1");
    std::uint64_t v = static_cast<std::uint64_t>(x + 2);
    unsigned lg = 63 - static_cast<unsigned>(__builtin_clzll(v));
    for (unsigned i = 0; i < lg; ++i) put_bit(false);
    put_bits(v, lg + 1);
}

bool BitReader::get_bit() {
    if (pos_ >= limit_) throw DecodeError("bit stream truncated");
    bool b = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1;
    ++pos_;
    return b;
}

std::uint64_t BitReader::get_bits(unsigned n) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < n; ++i) v = (v << 1) | (get_bit() ? 1u : 0u);
    return v;
}

std::int64_t BitReader::get_gamma() {
    unsigned zeros = 0;
    while (!get_bit()) {
        if (++zeros > 63) throw DecodeError("gamma code run too long");
    }
    std::uint64_t v = 1;
    for (unsigned i = 0; i < zeros; ++i) v = (v << 1) | (get_bit() ? 1u : 0u);
    return static_cast<std::int64_t>(v) - 2;
}

std::vector<bool> gamma_encode(std::int64_t x) {
    BitWriter w;
    w.put_gamma(x);
    std::vector<bool> out;
    out.reserve(w.bit_count());
    BitReader r(w.bytes());
    for (std::size_t i = 0; i < w.bit_count(); ++i) out.push_back(r.get_bit());
    return out;
}

std::int64_t gamma_decode(BitReader& reader) { return reader.get_gamma(); }

}  // namespace cardsketch
