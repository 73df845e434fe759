#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cardsketch {

struct DecodeError : std::runtime_error {
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

// Bit stream, MSB-first within each byte. The last byte is zero-padded.
class BitWriter {
public:
    void put_bit(bool b);
    void put_bits(std::uint64_t v, unsigned n);  // low n bits of v, MSB-first
    // Elias-gamma code of v = x + 2 >= 1: floor(log2 v) zeros, then the
    // binary digits of v. Total length 2*floor(log2(x+2)) + 1 bits.
    void put_gamma(std::int64_t x);

    std::size_t bit_count() const { return nbits_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t> take() { nbits_ = 0; return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t nbits_ = 0;
};

class BitReader {
public:
    BitReader(const std::uint8_t* data, std::size_t nbytes)
        : data_(data), limit_(nbytes * 8) {}
    BitReader(const std::vector<std::uint8_t>& bytes)
        : BitReader(bytes.data(), bytes.size()) {}

    bool get_bit();
    std::uint64_t get_bits(unsigned n);
    std::int64_t get_gamma();

    std::size_t bit_pos() const { return pos_; }
    std::size_t bits_left() const { return limit_ - pos_; }
    void align_to_byte() { pos_ = (pos_ + 7) / 8 * 8; }

private:
    const std::uint8_t* data_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

// Length of the gamma code for x >= -1.
inline unsigned gamma_bit_length(std::int64_t x) {
    std::uint64_t v = static_cast<std::uint64_t>(x + 2);
    unsigned lg = 63 - static_cast<unsigned>(__builtin_clzll(v));
    return 2 * lg + 1;
}

// Convenience forms used by tests and by the seed/sketch codecs.
std::vector<bool> gamma_encode(std::int64_t x);
std::int64_t gamma_decode(BitReader& reader);

}  // namespace cardsketch
