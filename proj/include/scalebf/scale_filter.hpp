#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "scalebf/group.hpp"
#include "scalebf/hash.hpp"
#include "scalebf/primes.hpp"

namespace scalebf {

/// Construction parameters for a ScaleBF.
struct FilterConfig {
    std::uint64_t slot_count = 0;    ///< prime number of chain slots
    Dim3 dims;                       ///< shared dimensions of every member filter
    std::uint32_t tau = 1;           ///< fullness threshold, items per cell, in [1, 63]
    std::uint64_t master_seed = 0;   ///< all hashing seeds derive from this

    void validate() const {
        if (!is_prime(slot_count))
            throw std::invalid_argument("slot count must be prime");
        dims.validate();
        if (tau < 1 || tau > kBitsPerCell)
            throw std::invalid_argument("tau must be in [1,63]");
    }

    /// Items one group accepts before it is declared full: tau * x * y * z.
    std::uint64_t group_capacity() const {
        return static_cast<std::uint64_t>(tau) * dims.cell_count();
    }

    bool operator==(const FilterConfig&) const = default;
};

/// Snapshot of structure occupancy. `load_factor` is groups per slot (Q/P).
/// Available capacity is reported two ways: `available_bits_eq` is the
/// headline figure tau*x*y*z*Q/P, one group's bit budget scaled by the load
/// factor; `remaining_item_capacity` is the operational figure, the number
/// of further insertions the existing groups accept, with
/// `remaining_bit_capacity` the same count in bits (one bit per member
/// filter, three per group).
struct ScaleStats {
    std::uint64_t slot_count = 0;
    std::uint64_t group_count = 0;
    std::uint64_t key_count = 0;
    double load_factor = 0.0;
    double available_bits_eq = 0.0;
    std::uint64_t remaining_item_capacity = 0;
    std::uint64_t remaining_bit_capacity = 0;
    std::vector<std::uint64_t> chain_lengths;   ///< one entry per slot
    std::vector<double> group_fill_ratios;      ///< slot-major, chain order
};

/// The scalable filter: a prime-sized table of slots, each holding an
/// ordered chain of filter groups. Keys route to a slot by hash, insert
/// into the chain's newest group, and look up by scanning the chain in
/// order. Growth is by appending a fresh group when the newest one fills,
/// so every group in a chain except the last is full.
///
/// Concurrency: any number of concurrent readers when no writer is active;
/// insertions require exclusive access.
class ScaleBF {
public:
    explicit ScaleBF(FilterConfig config) : config_(config) {
        config_.validate();
        chains_.resize(config_.slot_count);  // groups are allocated lazily
    }

    /// Rebuild from serialized parts, revalidating chain discipline.
    static ScaleBF restore(FilterConfig config, std::vector<std::vector<FilterGroup>> chains) {
        ScaleBF s(config);
        if (chains.size() != config.slot_count)
            throw std::invalid_argument("chain table size does not match slot count");
        for (const auto& chain : chains) {
            for (std::size_t g = 0; g < chain.size(); ++g) {
                if (chain[g].filter(0).dims() != config.dims)
                    throw std::invalid_argument("group dimensions do not match configuration");
                if (chain[g].capacity() != config.group_capacity())
                    throw std::invalid_argument("group capacity does not match configuration");
                if (g + 1 < chain.size() && !chain[g].is_full())
                    throw std::invalid_argument("non-terminal group in chain is not full");
                s.group_count_ += 1;
                s.key_count_ += chain[g].inserted_count();
            }
        }
        s.chains_ = std::move(chains);
        return s;
    }

    /// Slot index for a key: hash64(key, master_seed) mod slot_count.
    std::uint64_t route(std::string_view key) const {
        return hash64(key, routing_seed()) % config_.slot_count;
    }

    /// Inserts a key into the newest group of its routed chain, appending a
    /// fresh group first if the chain is empty or its newest group is full.
    void insert(std::string_view key) {
        const std::uint64_t slot = route(key);
        std::vector<FilterGroup>& chain = chains_[slot];
        if (chain.empty() || chain.back().is_full()) {
            chain.emplace_back(config_.dims, config_.tau,
                               group_seeds(config_.master_seed, slot, chain.size()));
            ++group_count_;
        }
        chain.back().insert(key);
        ++key_count_;
    }

    /// Scans the routed chain in order; true at the first group that
    /// reports the key present. Never false for an inserted key.
    bool contains(std::string_view key) const {
        for (const FilterGroup& g : chains_[route(key)]) {
            if (g.contains(key)) return true;
        }
        return false;
    }

    ScaleStats stats() const {
        ScaleStats st;
        st.slot_count = config_.slot_count;
        st.group_count = group_count_;
        st.key_count = key_count_;
        st.load_factor = static_cast<double>(group_count_) / static_cast<double>(config_.slot_count);
        st.available_bits_eq = static_cast<double>(config_.group_capacity()) * st.load_factor;
        st.chain_lengths.reserve(chains_.size());
        st.group_fill_ratios.reserve(group_count_);
        for (const auto& chain : chains_) {
            st.chain_lengths.push_back(chain.size());
            for (const FilterGroup& g : chain) {
                st.remaining_item_capacity += g.capacity() - g.inserted_count();
                st.group_fill_ratios.push_back(g.fill_ratio());
            }
        }
        st.remaining_bit_capacity = st.remaining_item_capacity * kFiltersPerGroup;
        return st;
    }

    const FilterConfig& config() const { return config_; }
    std::uint64_t routing_seed() const { return config_.master_seed; }
    std::uint64_t group_count() const { return group_count_; }
    std::uint64_t key_count() const { return key_count_; }
    std::span<const FilterGroup> chain(std::uint64_t slot) const { return chains_.at(slot); }

    /// Seed triple for the group at (slot, ordinal). Injective over
    /// ordinals below 2^20, and never equal to the routing seed, so every
    /// filter in the structure hashes independently. All arithmetic is
    /// mod 2^64.
    static std::array<std::uint64_t, 3> group_seeds(std::uint64_t master_seed, std::uint64_t slot,
                                                    std::uint64_t ordinal) {
        const std::uint64_t base = master_seed + 1 + 3 * (slot * (1ULL << 20) + ordinal);
        return {base, base + 1, base + 2};
    }

private:
    FilterConfig config_;
    std::vector<std::vector<FilterGroup>> chains_;
    std::uint64_t group_count_ = 0;
    std::uint64_t key_count_ = 0;
};

}  // namespace scalebf
