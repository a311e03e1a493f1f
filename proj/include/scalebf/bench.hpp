#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "scalebf/scale_filter.hpp"

namespace scalebf {

/// Measurements for one benchmark scale. `mean_chain_length` and
/// `load_factor` both equal groups/slots; they are reported side by side
/// because readers look for either name.
struct BenchRow {
    std::uint64_t key_count = 0;
    double insert_p50_ns = 0.0;
    double insert_p99_ns = 0.0;
    double lookup_p50_ns = 0.0;
    double lookup_p99_ns = 0.0;
    double insert_mkeys_per_s = 0.0;
    double lookup_mkeys_per_s = 0.0;
    double mean_chain_length = 0.0;
    std::uint64_t group_count = 0;
    double load_factor = 0.0;
};

struct BenchOptions {
    FilterConfig config;                 ///< a fresh structure is built per scale
    std::vector<std::uint64_t> scales;   ///< key counts, strictly ascending
    std::uint64_t rng_seed = 1;
    std::uint64_t target_samples = 100000;  ///< timed operations per phase
};

namespace detail {

inline void format_hex16(std::uint64_t v, char* out) {
    static constexpr char kHex[] = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        out[i] = kHex[v & 0xF];
        v >>= 4;
    }
}

// Fixed-width hex keys drawn from a seeded generator, produced in blocks so
// key formatting stays out of the timed sections.
class KeyBlockSource {
public:
    static constexpr std::size_t kKeyLen = 16;
    static constexpr std::size_t kBlockKeys = 1 << 16;

    explicit KeyBlockSource(std::uint64_t seed) : rng_(seed) {
        buffer_.resize(kBlockKeys * kKeyLen);
    }

    /// Fills the next block; returns the number of keys produced.
    std::size_t fill(std::uint64_t remaining) {
        count_ = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kBlockKeys));
        for (std::size_t i = 0; i < count_; ++i) format_hex16(rng_(), buffer_.data() + i * kKeyLen);
        return count_;
    }

    std::string_view key(std::size_t i) const {
        return std::string_view(buffer_.data() + i * kKeyLen, kKeyLen);
    }

    std::size_t count() const { return count_; }

private:
    std::mt19937_64 rng_;
    std::vector<char> buffer_;
    std::size_t count_ = 0;
};

inline double percentile(std::vector<double>& sorted_samples, double p) {
    const std::size_t n = sorted_samples.size();
    const std::size_t idx = std::min(n - 1, static_cast<std::size_t>(p * static_cast<double>(n)));
    return sorted_samples[idx];
}

}  // namespace detail

/// Builds a fresh structure per scale, inserts `scale` random keys, then
/// looks every key up again. Latency is sampled on individual operations
/// (at least target_samples per phase, stride-spaced); throughput comes
/// from the whole phase's wall time. The same RNG seed is reused across
/// scales, so smaller scales insert a prefix of the larger key streams.
inline std::vector<BenchRow> run_bench(const BenchOptions& opts) {
    using clock = std::chrono::steady_clock;
    opts.config.validate();
    if (opts.scales.empty()) throw std::invalid_argument("at least one scale required");
    if (!std::is_sorted(opts.scales.begin(), opts.scales.end()) ||
        std::adjacent_find(opts.scales.begin(), opts.scales.end()) != opts.scales.end())
        throw std::invalid_argument("scales must be strictly ascending");
    if (opts.target_samples == 0) throw std::invalid_argument("target_samples must be positive");

    std::vector<BenchRow> rows;
    for (std::uint64_t scale : opts.scales) {
        ScaleBF filter(opts.config);
        const std::uint64_t stride = std::max<std::uint64_t>(1, scale / opts.target_samples);

        std::vector<double> insert_ns;
        insert_ns.reserve(scale / stride + 1);
        std::chrono::duration<double> insert_wall{0};
        detail::KeyBlockSource source(opts.rng_seed);
        std::uint64_t produced = 0;
        while (produced < scale) {
            const std::size_t count = source.fill(scale - produced);
            const auto block_start = clock::now();
            for (std::size_t i = 0; i < count; ++i) {
                if ((produced + i) % stride == 0) {
                    const auto t0 = clock::now();
                    filter.insert(source.key(i));
                    const auto t1 = clock::now();
                    insert_ns.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
                } else {
                    filter.insert(source.key(i));
                }
            }
            insert_wall += clock::now() - block_start;
            produced += count;
        }

        std::vector<double> lookup_ns;
        lookup_ns.reserve(scale / stride + 1);
        std::chrono::duration<double> lookup_wall{0};
        std::uint64_t hits = 0;
        detail::KeyBlockSource probe(opts.rng_seed);  // same key stream again
        std::uint64_t probed = 0;
        while (probed < scale) {
            const std::size_t count = probe.fill(scale - probed);
            const auto block_start = clock::now();
            for (std::size_t i = 0; i < count; ++i) {
                bool found;
                if ((probed + i) % stride == 0) {
                    const auto t0 = clock::now();
                    found = filter.contains(probe.key(i));
                    const auto t1 = clock::now();
                    lookup_ns.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
                } else {
                    found = filter.contains(probe.key(i));
                }
                hits += found;
            }
            lookup_wall += clock::now() - block_start;
            probed += count;
        }
        if (hits != scale) throw std::logic_error("benchmark observed a false negative");

        std::sort(insert_ns.begin(), insert_ns.end());
        std::sort(lookup_ns.begin(), lookup_ns.end());
        BenchRow row;
        row.key_count = scale;
        row.insert_p50_ns = detail::percentile(insert_ns, 0.50);
        row.insert_p99_ns = detail::percentile(insert_ns, 0.99);
        row.lookup_p50_ns = detail::percentile(lookup_ns, 0.50);
        row.lookup_p99_ns = detail::percentile(lookup_ns, 0.99);
        row.insert_mkeys_per_s = static_cast<double>(scale) / insert_wall.count() / 1e6;
        row.lookup_mkeys_per_s = static_cast<double>(scale) / lookup_wall.count() / 1e6;
        row.group_count = filter.group_count();
        row.load_factor =
            static_cast<double>(filter.group_count()) / static_cast<double>(opts.config.slot_count);
        row.mean_chain_length = row.load_factor;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace scalebf
