#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "scalebf/hash.hpp"
#include "scalebf/primes.hpp"

namespace scalebf {

/// Usable bit positions per cell. Bit 63 of every cell stays zero.
inline constexpr std::uint32_t kBitsPerCell = 63;

/// Hard cap on cells per filter so the cell array always fits addressable
/// memory (2^31 cells = 16 GiB of words).
inline constexpr std::uint64_t kMaxCells = 1ULL << 31;

/// Cube dimensions. Each axis must be a distinct prime, and none may share
/// a factor with 63 (i.e. 3 and 7 are rejected): with x, y, z and 63
/// pairwise coprime, (i, j, k, bit) is a bijection of h mod (x*y*z*63), so
/// every residue addresses a distinct bit.
struct Dim3 {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t z = 0;

    void validate() const {
        for (std::uint32_t d : {x, y, z}) {
            if (d < 2 || !is_prime(d))
                throw std::invalid_argument("dimension must be a prime greater than 1");
            if (d == 3 || d == 7)
                throw std::invalid_argument("dimension shares a factor with 63");
        }
        if (x == y || y == z || x == z)
            throw std::invalid_argument("dimensions must be pairwise distinct");
        if (cell_count() > kMaxCells)
            throw std::invalid_argument("dimension product exceeds 2^31 cells");
    }

    std::uint64_t cell_count() const {
        return static_cast<std::uint64_t>(x) * y * z;
    }

    /// Total usable bits: x*y*z*63.
    std::uint64_t bit_capacity() const { return cell_count() * kBitsPerCell; }

    bool operator==(const Dim3&) const = default;
};

/// Address of a single bit: cell (i, j, k), bit position `bit` in [0, 63).
struct CellCoord {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    std::uint32_t k = 0;
    std::uint32_t bit = 0;

    bool operator==(const CellCoord&) const = default;
};

/// Residue decomposition of a hash value: (h mod x, h mod y, h mod z, h mod 63).
inline CellCoord cell_coord(std::uint64_t h, const Dim3& dims) {
    return CellCoord{static_cast<std::uint32_t>(h % dims.x),
                     static_cast<std::uint32_t>(h % dims.y),
                     static_cast<std::uint32_t>(h % dims.z),
                     static_cast<std::uint32_t>(h % kBitsPerCell)};
}

/// A 3D Bloom filter: a cube of 64-bit cells stored as one contiguous
/// row-major array. Each inserted hash sets exactly one bit, chosen by the
/// four residues of the hash value. Single hash function, no deletion, no
/// false negatives.
class Bloom3D {
public:
    Bloom3D(Dim3 dims, std::uint64_t seed)
        : dims_(dims), seed_(seed) {
        dims_.validate();
        cells_.assign(dims_.cell_count(), 0);
    }

    /// Rebuild a filter from serialized parts. Recomputes the set-bit count
    /// and rejects cell words with bit 63 set.
    static Bloom3D restore(Dim3 dims, std::uint64_t seed, std::uint64_t inserted_count,
                           std::vector<std::uint64_t> cells) {
        Bloom3D f(dims, seed);
        if (cells.size() != f.cells_.size())
            throw std::invalid_argument("cell array size does not match dimensions");
        std::uint64_t set_bits = 0;
        for (std::uint64_t w : cells) {
            if (w >> kBitsPerCell)
                throw std::invalid_argument("cell has reserved bit 63 set");
            set_bits += std::popcount(w);
        }
        if (set_bits > inserted_count)
            throw std::invalid_argument("set-bit count exceeds inserted count");
        f.cells_ = std::move(cells);
        f.inserted_ = inserted_count;
        f.set_bits_ = set_bits;
        return f;
    }

    void insert_hash(std::uint64_t h) {
        CellCoord c = cell_coord(h, dims_);
        std::uint64_t& word = cells_[cell_index(c)];
        const std::uint64_t mask = 1ULL << c.bit;
        set_bits_ += (word & mask) == 0;
        word |= mask;
        ++inserted_;
    }

    bool contains_hash(std::uint64_t h) const {
        CellCoord c = cell_coord(h, dims_);
        return (cells_[cell_index(c)] >> c.bit) & 1ULL;
    }

    /// Hashes the key with this filter's seed and inserts it.
    void insert(std::string_view key) { insert_hash(hash64(key, seed_)); }

    /// Membership test for a key via this filter's seed.
    bool contains(std::string_view key) const { return contains_hash(hash64(key, seed_)); }

    /// Fraction of the x*y*z*63 usable bits currently set.
    double set_bit_fraction() const {
        return static_cast<double>(set_bits_) / static_cast<double>(dims_.bit_capacity());
    }

    /// Full once inserted_count reaches tau items per cell (tau in [1, 63]).
    bool is_full(std::uint32_t tau) const {
        if (tau < 1 || tau > kBitsPerCell)
            throw std::invalid_argument("tau must be in [1,63]");
        return inserted_ >= static_cast<std::uint64_t>(tau) * dims_.cell_count();
    }

    const Dim3& dims() const { return dims_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t inserted_count() const { return inserted_; }
    std::uint64_t set_bit_count() const { return set_bits_; }
    std::span<const std::uint64_t> cells() const { return cells_; }

private:
    std::size_t cell_index(const CellCoord& c) const {
        return (static_cast<std::size_t>(c.i) * dims_.y + c.j) * dims_.z + c.k;
    }

    Dim3 dims_;
    std::uint64_t seed_ = 0;
    std::uint64_t inserted_ = 0;
    std::uint64_t set_bits_ = 0;
    std::vector<std::uint64_t> cells_;
};

}  // namespace scalebf
