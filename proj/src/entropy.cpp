#include "cardsketch/entropy.hpp"

namespace cardsketch {

std::uint64_t BitSource::next_bits(unsigned n) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < n; ++i) v = (v << 1) | (next_bit() ? 1u : 0u);
    return v;
}

Nat BitSource::next_nat(std::size_t nbits) {
    if (nbits == 0) return Nat{0};
    // assemble MSB-first into bytes, then import in one pass
    std::vector<std::uint8_t> buf((nbits + 7) / 8);
    std::size_t idx = 0;
    const unsigned lead = static_cast<unsigned>(nbits % 8);
    if (lead != 0) buf[idx++] = static_cast<std::uint8_t>(next_bits(lead));
    for (; idx < buf.size(); ++idx) buf[idx] = static_cast<std::uint8_t>(next_bits(8));
    return nat_from_bytes_be(buf.data(), buf.size());
}

bool Mt19937BitSource::next_bit() {
    if (avail_ == 0) {
        buffer_ = engine_();
        avail_ = 64;
    }
    --avail_;
    return (buffer_ >> avail_) & 1;
}

bool ReplayBitSource::next_bit() {
    if (pos_ >= bits_.size()) throw std::runtime_error("replay bit stream exhausted");
    return bits_[pos_++];
}

bool RecordingBitSource::next_bit() {
    bool b = inner_->next_bit();
    log_.push_back(b);
    return b;
}

}  // namespace cardsketch
