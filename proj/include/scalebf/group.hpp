#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "scalebf/bloom3d.hpp"

namespace scalebf {

inline constexpr int kFiltersPerGroup = 3;

/// One logical Bloom filter made of three Bloom3D members sharing the same
/// dimensions but hashing with distinct seeds. A key is inserted into all
/// three; membership requires all three to answer positively, so the group
/// false-positive probability is the product of the member probabilities.
class FilterGroup {
public:
    FilterGroup(Dim3 dims, std::uint32_t tau, const std::array<std::uint64_t, 3>& seeds)
        : filters_{Bloom3D(dims, seeds[0]), Bloom3D(dims, seeds[1]), Bloom3D(dims, seeds[2])} {
        if (seeds[0] == seeds[1] || seeds[1] == seeds[2] || seeds[0] == seeds[2])
            throw std::invalid_argument("group seeds must be pairwise distinct");
        if (tau < 1 || tau > kBitsPerCell)
            throw std::invalid_argument("tau must be in [1,63]");
        capacity_ = static_cast<std::uint64_t>(tau) * dims.cell_count();
    }

    static FilterGroup restore(std::array<Bloom3D, 3> filters, std::uint64_t capacity) {
        if (filters[0].dims() != filters[1].dims() || filters[1].dims() != filters[2].dims())
            throw std::invalid_argument("group members must share dimensions");
        if (filters[0].inserted_count() != filters[1].inserted_count() ||
            filters[1].inserted_count() != filters[2].inserted_count())
            throw std::invalid_argument("group members disagree on inserted count");
        if (filters[0].seed() == filters[1].seed() || filters[1].seed() == filters[2].seed() ||
            filters[0].seed() == filters[2].seed())
            throw std::invalid_argument("group seeds must be pairwise distinct");
        if (capacity == 0)
            throw std::invalid_argument("group capacity must be positive");
        FilterGroup g(std::move(filters));
        g.capacity_ = capacity;
        if (g.inserted_count() > capacity)
            throw std::invalid_argument("group inserted count exceeds capacity");
        return g;
    }

    /// Inserts the key into all three member filters. The caller must check
    /// is_full() first; inserting into a full group is a contract violation.
    void insert(std::string_view key) {
        if (is_full())
            throw std::logic_error("insert into full filter group");
        for (Bloom3D& f : filters_) f.insert(key);
    }

    /// True iff all three member filters report the key present.
    bool contains(std::string_view key) const {
        for (const Bloom3D& f : filters_) {
            if (!f.contains(key)) return false;
        }
        return true;
    }

    bool is_full() const { return inserted_count() >= capacity_; }

    /// Every key goes into all three members, so any member's count is the
    /// group's count.
    std::uint64_t inserted_count() const { return filters_[0].inserted_count(); }

    std::uint64_t capacity() const { return capacity_; }

    double fill_ratio() const {
        return static_cast<double>(inserted_count()) / static_cast<double>(capacity_);
    }

    const Bloom3D& filter(int idx) const { return filters_.at(static_cast<std::size_t>(idx)); }
    const std::array<Bloom3D, 3>& filters() const { return filters_; }

private:
    explicit FilterGroup(std::array<Bloom3D, 3> filters) : filters_(std::move(filters)) {}

    std::array<Bloom3D, 3> filters_;
    std::uint64_t capacity_ = 0;
};

}  // namespace scalebf
