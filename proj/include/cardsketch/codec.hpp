#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cardsketch/outer.hpp"

namespace cardsketch {

// Byte-level formats are frozen; see docs/FORMATS.md for the layouts and
// worked examples. All multi-byte integers are little-endian, bit streams
// are MSB-first within bytes and zero-padded to a byte boundary at the end.

std::uint64_t fnv1a64(std::span<const std::uint8_t> data);

// Standalone inner sketch encoding: a fixed header (magic, version, n-bits,
// l, b) followed by one bit stream holding gamma(q+1) and the l*b table
// values row-major. The table region of a compressed sketch never exceeds
// (2*c5_space + 1) * b * l bits; both encode and decode enforce it.
std::vector<std::uint8_t> encode_sketch(const Sketch& s, const Params& p);
Sketch decode_sketch(std::span<const std::uint8_t> bytes, const Params& p);
// Decodes one sketch starting at `offset`, advancing it past the consumed
// bytes (bodies are concatenated without length prefixes).
Sketch decode_sketch_at(std::span<const std::uint8_t> bytes, std::size_t& offset,
                        const Params& p);

// Hash seed serialization: fixed header (k, d, out bits), then the
// coefficients, each in ceil(d/8) little-endian bytes, concatenated.
std::vector<std::uint8_t> encode_kwise_seed(const KWiseHash& h);
KWiseHash decode_kwise_seed(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_geometric_seed(const GeometricHash& g);
GeometricHash decode_geometric_seed(std::span<const std::uint8_t> bytes);

// Walk seed serialization: length-prefixed big-endian start index, then the
// 3-bit step labels packed into a bit stream.
std::vector<std::uint8_t> encode_walk_seed(const WalkSeed& seed);
WalkSeed decode_walk_seed(std::span<const std::uint8_t> bytes, const WalkSpace& ws);

// Container files carry the full parameter block so mismatched inputs are
// rejected instead of silently merged. Sketch files reference the seed they
// were built from via the seed file's payload fingerprint.
struct LoadedSeed {
    OuterParams plan;
    SeedTheta seed;
    std::uint64_t seed_id = 0;
};

struct LoadedSketch {
    OuterParams plan;
    VectorSketch sketch;
    std::uint64_t seed_id = 0;
};

std::vector<std::uint8_t> encode_seed_file(const OuterParams& op, const SeedTheta& seed);
LoadedSeed decode_seed_file(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_sketch_file(const OuterParams& op,
                                             std::uint64_t seed_id,
                                             const VectorSketch& d);
LoadedSketch decode_sketch_file(std::span<const std::uint8_t> bytes);

}  // namespace cardsketch
