#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "cardsketch/nat.hpp"

namespace cardsketch {

// Source of random bits. Seeding is the only randomized step of the whole
// algorithm, so everything that consumes randomness takes one of these;
// a fixed source makes every downstream value reproducible.
class BitSource {
public:
    virtual ~BitSource() = default;
    virtual bool next_bit() = 0;

    // n <= 64 bits, assembled MSB-first.
    std::uint64_t next_bits(unsigned n);
    // nbits bits assembled MSB-first into an unbounded natural.
    Nat next_nat(std::size_t nbits);
};

// PRNG-backed source; bits are served MSB-first from successive 64-bit draws.
class Mt19937BitSource final : public BitSource {
public:
    explicit Mt19937BitSource(std::uint64_t seed) : engine_(seed) {}
    bool next_bit() override;

private:
    std::mt19937_64 engine_;
    std::uint64_t buffer_ = 0;
    unsigned avail_ = 0;
};

// Replays a recorded bit stream; throws when exhausted.
class ReplayBitSource final : public BitSource {
public:
    explicit ReplayBitSource(std::vector<bool> bits) : bits_(std::move(bits)) {}
    bool next_bit() override;
    std::size_t consumed() const { return pos_; }

private:
    std::vector<bool> bits_;
    std::size_t pos_ = 0;
};

// Wraps another source and records everything it served.
class RecordingBitSource final : public BitSource {
public:
    explicit RecordingBitSource(BitSource& inner) : inner_(&inner) {}
    bool next_bit() override;
    const std::vector<bool>& recorded() const { return log_; }

private:
    BitSource* inner_;
    std::vector<bool> log_;
};

}  // namespace cardsketch
