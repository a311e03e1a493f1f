#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

// Seeded 64-bit key hashing. We implement MurmurHash3_x64_128 (transcribed
// from the public-domain reference) and take the low 64 bits of the digest.
// The seed parameter is widened to 64 bits; for seeds below 2^32 the digest
// is bit-identical to the reference implementation.

namespace scalebf {

namespace detail {

inline std::uint64_t rotl64(std::uint64_t x, int r) {
    return (x << r) | (x >> (64 - r));
}

inline std::uint64_t fmix64(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

inline std::uint64_t load_u64_le(const unsigned char* p) {
    std::uint64_t v;
    std::memcpy(&v, p, sizeof(v));
    return v;  // TODO: byte-swap here if a big-endian port is ever needed
}

}  // namespace detail

/// MurmurHash3_x64_128 digest of `len` bytes at `key`, written to `out[2]`.
inline void murmur3_x64_128(const void* key, std::size_t len, std::uint64_t seed,
                            std::uint64_t out[2]) {
    const auto* data = static_cast<const unsigned char*>(key);
    const std::size_t nblocks = len / 16;

    std::uint64_t h1 = seed;
    std::uint64_t h2 = seed;

    const std::uint64_t c1 = 0x87c37b91114253d5ULL;
    const std::uint64_t c2 = 0x4cf5ad432745937fULL;

    for (std::size_t i = 0; i < nblocks; ++i) {
        std::uint64_t k1 = detail::load_u64_le(data + i * 16);
        std::uint64_t k2 = detail::load_u64_le(data + i * 16 + 8);

        k1 *= c1;
        k1 = detail::rotl64(k1, 31);
        k1 *= c2;
        h1 ^= k1;
        h1 = detail::rotl64(h1, 27);
        h1 += h2;
        h1 = h1 * 5 + 0x52dce729;

        k2 *= c2;
        k2 = detail::rotl64(k2, 33);
        k2 *= c1;
        h2 ^= k2;
        h2 = detail::rotl64(h2, 31);
        h2 += h1;
        h2 = h2 * 5 + 0x38495ab5;
    }

    const unsigned char* tail = data + nblocks * 16;
    std::uint64_t k1 = 0;
    std::uint64_t k2 = 0;
    switch (len & 15) {
        case 15: k2 ^= static_cast<std::uint64_t>(tail[14]) << 48; [[fallthrough]];
        case 14: k2 ^= static_cast<std::uint64_t>(tail[13]) << 40; [[fallthrough]];
        case 13: k2 ^= static_cast<std::uint64_t>(tail[12]) << 32; [[fallthrough]];
        case 12: k2 ^= static_cast<std::uint64_t>(tail[11]) << 24; [[fallthrough]];
        case 11: k2 ^= static_cast<std::uint64_t>(tail[10]) << 16; [[fallthrough]];
        case 10: k2 ^= static_cast<std::uint64_t>(tail[9]) << 8; [[fallthrough]];
        case 9:
            k2 ^= static_cast<std::uint64_t>(tail[8]);
            k2 *= c2;
            k2 = detail::rotl64(k2, 33);
            k2 *= c1;
            h2 ^= k2;
            [[fallthrough]];
        case 8: k1 ^= static_cast<std::uint64_t>(tail[7]) << 56; [[fallthrough]];
        case 7: k1 ^= static_cast<std::uint64_t>(tail[6]) << 48; [[fallthrough]];
        case 6: k1 ^= static_cast<std::uint64_t>(tail[5]) << 40; [[fallthrough]];
        case 5: k1 ^= static_cast<std::uint64_t>(tail[4]) << 32; [[fallthrough]];
        case 4: k1 ^= static_cast<std::uint64_t>(tail[3]) << 24; [[fallthrough]];
        case 3: k1 ^= static_cast<std::uint64_t>(tail[2]) << 16; [[fallthrough]];
        case 2: k1 ^= static_cast<std::uint64_t>(tail[1]) << 8; [[fallthrough]];
        case 1:
            k1 ^= static_cast<std::uint64_t>(tail[0]);
            k1 *= c1;
            k1 = detail::rotl64(k1, 31);
            k1 *= c2;
            h1 ^= k1;
    }

    h1 ^= static_cast<std::uint64_t>(len);
    h2 ^= static_cast<std::uint64_t>(len);
    h1 += h2;
    h2 += h1;
    h1 = detail::fmix64(h1);
    h2 = detail::fmix64(h2);
    h1 += h2;
    h2 += h1;

    out[0] = h1;
    out[1] = h2;
}

/// Seeded 64-bit hash of an arbitrary byte string (low 64 bits of the
/// 128-bit digest). Pure function; identical inputs give identical outputs
/// on every platform.
inline std::uint64_t hash64(std::string_view key, std::uint64_t seed) {
    std::uint64_t out[2];
    murmur3_x64_128(key.data(), key.size(), seed, out);
    return out[0];
}

}  // namespace scalebf
