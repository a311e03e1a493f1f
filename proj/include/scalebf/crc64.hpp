#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace scalebf {

// CRC-64/XZ (reflected polynomial 0xC96C5795D7870F42, init and xorout all
// ones). Check value: crc64 of "123456789" is 0x995DC9BBDF1939FA.

namespace detail {

inline constexpr std::array<std::uint64_t, 256> kCrc64Table = [] {
    std::array<std::uint64_t, 256> table{};
    for (std::uint64_t i = 0; i < 256; ++i) {
        std::uint64_t crc = i;
        for (int bit = 0; bit < 8; ++bit)
            crc = (crc >> 1) ^ ((crc & 1) ? 0xC96C5795D7870F42ULL : 0);
        table[i] = crc;
    }
    return table;
}();

}  // namespace detail

/// Streaming update: feed chunks in order, starting from crc64_init().
inline constexpr std::uint64_t crc64_init() { return ~0ULL; }

inline std::uint64_t crc64_update(std::uint64_t state, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i)
        state = detail::kCrc64Table[(state ^ p[i]) & 0xFF] ^ (state >> 8);
    return state;
}

inline constexpr std::uint64_t crc64_finish(std::uint64_t state) { return ~state; }

/// One-shot CRC-64 of a buffer.
inline std::uint64_t crc64(const void* data, std::size_t len) {
    return crc64_finish(crc64_update(crc64_init(), data, len));
}

}  // namespace scalebf
