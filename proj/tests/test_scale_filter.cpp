#include "scalebf/scale_filter.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalebf/hash.hpp"
#include "test_support.hpp"

namespace {

using scalebf::Dim3;
using scalebf::FilterConfig;
using scalebf::FilterGroup;
using scalebf::ScaleBF;
using scalebf::ScaleStats;

constexpr Dim3 kSmall{5, 11, 13};  // per-group capacity 715 at tau=1

FilterConfig small_config(std::uint64_t slots, std::uint64_t seed = 42) {
    return FilterConfig{slots, kSmall, 1, seed};
}

TEST(FilterConfig, Validation) {
    EXPECT_NO_THROW(small_config(97).validate());
    EXPECT_NO_THROW(small_config(2).validate());

    try {
        small_config(96).validate();
        FAIL() << "expected std::invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_STREQ(e.what(), "slot count must be prime");
    }
    EXPECT_THROW(small_config(0).validate(), std::invalid_argument);
    EXPECT_THROW(small_config(1).validate(), std::invalid_argument);

    FilterConfig bad_dims{97, Dim3{5, 11, 21}, 1, 42};
    EXPECT_THROW(bad_dims.validate(), std::invalid_argument);
    FilterConfig bad_tau{97, kSmall, 0, 42};
    EXPECT_THROW(bad_tau.validate(), std::invalid_argument);
}

TEST(FilterConfig, GroupCapacity) {
    EXPECT_EQ(small_config(97).group_capacity(), 715u);
    EXPECT_EQ((FilterConfig{97, kSmall, 63, 42}.group_capacity()), 45045u);
}

TEST(ScaleBF, RoutingIsSeededHashModSlots) {
    ScaleBF s(small_config(97, 7));
    for (const char* key : {"alpha", "beta", "gamma", ""}) {
        EXPECT_EQ(s.route(key), scalebf::hash64(key, 7) % 97);
    }
}

TEST(ScaleBF, RoutingCoversAllSlots) {
    ScaleBF s(small_config(97));
    std::set<std::uint64_t> seen;
    std::mt19937_64 rng(61);
    for (int i = 0; i < 20000; ++i) seen.insert(s.route(testsup::rand_key(rng)));
    EXPECT_EQ(seen.size(), 97u);
}

TEST(ScaleBF, RoutingIsUniformAcrossSlots) {
    ScaleBF s(small_config(97));
    std::vector<std::uint64_t> counts(97, 0);
    std::mt19937_64 rng(63);
    const std::uint64_t total = 1000000;
    for (std::uint64_t i = 0; i < total; ++i) ++counts[s.route(testsup::rand_key(rng))];
    const double stat = testsup::chi_squared_uniform_stat(counts, total);
    EXPECT_LT(stat, testsup::chi_squared_critical(96, 0.001));
}

TEST(ScaleBF, GroupsAllocateLazily) {
    ScaleBF s(small_config(97));
    EXPECT_EQ(s.group_count(), 0u);
    EXPECT_EQ(s.key_count(), 0u);
    for (std::uint64_t slot = 0; slot < 97; ++slot) EXPECT_TRUE(s.chain(slot).empty());
    EXPECT_FALSE(s.contains("anything"));

    s.insert("alpha");
    EXPECT_EQ(s.group_count(), 1u);
    EXPECT_EQ(s.key_count(), 1u);
    const std::uint64_t home = s.route("alpha");
    for (std::uint64_t slot = 0; slot < 97; ++slot) {
        EXPECT_EQ(s.chain(slot).size(), slot == home ? 1u : 0u);
    }
}

TEST(ScaleBF, NoFalseNegatives) {
    ScaleBF s(small_config(97));
    std::mt19937_64 rng(67);
    std::vector<std::string> keys;
    for (int i = 0; i < 100000; ++i) keys.push_back(testsup::rand_key(rng));
    for (const std::string& k : keys) s.insert(k);
    EXPECT_EQ(s.key_count(), 100000u);
    for (const std::string& k : keys) ASSERT_TRUE(s.contains(k));
}

TEST(ScaleBF, ChainsGrowAndKeepDiscipline) {
    // ~1600 keys per slot against capacity 715 forces chains of length 3.
    ScaleBF s(small_config(5, 3));
    std::mt19937_64 rng(71);
    for (int i = 0; i < 8000; ++i) s.insert(testsup::rand_key(rng));

    std::uint64_t groups = 0;
    std::uint64_t keys = 0;
    for (std::uint64_t slot = 0; slot < 5; ++slot) {
        const auto chain = s.chain(slot);
        EXPECT_GE(chain.size(), 2u);
        for (std::size_t g = 0; g < chain.size(); ++g) {
            if (g + 1 < chain.size()) {
                EXPECT_TRUE(chain[g].is_full());
                EXPECT_EQ(chain[g].inserted_count(), 715u);
            } else {
                EXPECT_LE(chain[g].inserted_count(), 715u);
            }
            keys += chain[g].inserted_count();
        }
        groups += chain.size();
    }
    EXPECT_EQ(groups, s.group_count());
    EXPECT_EQ(keys, 8000u);
}

TEST(ScaleBF, LookupAgreesWithResidueSetOracle) {
    // Independent model: replay the insertion stream, routing each key with
    // hash64 and assigning it to group floor(arrival_index / 715) of its
    // slot. A member filter is exactly a set of residues mod 45045 under its
    // own seed, so the model predicts every verdict the structure may give.
    const FilterConfig cfg = small_config(5, 9);
    ScaleBF s(cfg);

    // oracle[slot] is a chain of groups; each group holds 3 residue sets
    std::vector<std::vector<std::array<std::set<std::uint64_t>, 3>>> oracle(5);
    std::vector<std::uint64_t> arrivals(5, 0);

    std::mt19937_64 rng(73);
    std::vector<std::string> keys;
    for (int i = 0; i < 6000; ++i) keys.push_back(testsup::rand_key(rng));

    for (const std::string& k : keys) {
        s.insert(k);
        const std::uint64_t slot = scalebf::hash64(k, 9) % 5;
        const std::uint64_t ordinal = arrivals[slot] / 715;
        ++arrivals[slot];
        if (oracle[slot].size() <= ordinal) oracle[slot].emplace_back();
        const auto seeds = ScaleBF::group_seeds(9, slot, ordinal);
        for (int m = 0; m < 3; ++m) {
            oracle[slot][ordinal][m].insert(scalebf::hash64(k, seeds[m]) % 45045);
        }
    }

    auto oracle_contains = [&](const std::string& k) {
        const std::uint64_t slot = scalebf::hash64(k, 9) % 5;
        for (std::size_t g = 0; g < oracle[slot].size(); ++g) {
            const auto seeds = ScaleBF::group_seeds(9, slot, g);
            bool all = true;
            for (int m = 0; m < 3 && all; ++m) {
                all = oracle[slot][g][m].count(scalebf::hash64(k, seeds[m]) % 45045) > 0;
            }
            if (all) return true;
        }
        return false;
    };

    for (const std::string& k : keys) ASSERT_TRUE(s.contains(k)) << k;
    for (const std::string& k : keys) ASSERT_TRUE(oracle_contains(k)) << k;
    for (int i = 0; i < 20000; ++i) {
        const std::string probe = testsup::rand_key(rng);
        ASSERT_EQ(s.contains(probe), oracle_contains(probe)) << probe;
    }
}

TEST(ScaleBF, GroupSeedsAreInjectiveAndAvoidRoutingSeed) {
    const std::uint64_t master = 42;
    std::set<std::uint64_t> seen{master};
    for (std::uint64_t slot = 0; slot < 50; ++slot) {
        for (std::uint64_t ordinal = 0; ordinal < 40; ++ordinal) {
            const auto seeds = ScaleBF::group_seeds(master, slot, ordinal);
            EXPECT_EQ(seeds[0], master + 1 + 3 * (slot * (1ULL << 20) + ordinal));
            EXPECT_EQ(seeds[1], seeds[0] + 1);
            EXPECT_EQ(seeds[2], seeds[0] + 2);
            for (std::uint64_t v : seeds) {
                EXPECT_TRUE(seen.insert(v).second) << "seed reuse at slot " << slot;
            }
        }
    }
}

TEST(ScaleBF, StatsReflectStructure) {
    ScaleBF s(small_config(5, 3));
    std::mt19937_64 rng(79);
    for (int i = 0; i < 8000; ++i) s.insert(testsup::rand_key(rng));

    const ScaleStats st = s.stats();
    EXPECT_EQ(st.slot_count, 5u);
    EXPECT_EQ(st.group_count, s.group_count());
    EXPECT_EQ(st.key_count, 8000u);
    EXPECT_DOUBLE_EQ(st.load_factor, static_cast<double>(st.group_count) / 5.0);
    EXPECT_DOUBLE_EQ(st.available_bits_eq, 715.0 * st.load_factor);

    ASSERT_EQ(st.chain_lengths.size(), 5u);
    std::uint64_t total_groups = 0;
    for (std::uint64_t len : st.chain_lengths) total_groups += len;
    EXPECT_EQ(total_groups, st.group_count);

    ASSERT_EQ(st.group_fill_ratios.size(), st.group_count);
    EXPECT_EQ(st.remaining_item_capacity, st.group_count * 715 - 8000);
    EXPECT_EQ(st.remaining_bit_capacity, st.remaining_item_capacity * 3);

    // every fill ratio but the per-chain last must be 1.0
    std::size_t idx = 0;
    for (std::uint64_t slot = 0; slot < 5; ++slot) {
        for (std::uint64_t g = 0; g < st.chain_lengths[slot]; ++g, ++idx) {
            if (g + 1 < st.chain_lengths[slot]) {
                EXPECT_DOUBLE_EQ(st.group_fill_ratios[idx], 1.0);
            } else {
                EXPECT_LE(st.group_fill_ratios[idx], 1.0);
            }
        }
    }
}

TEST(ScaleBF, InsertionsAreSlotLocal) {
    // Two structures with identical config diverge only in slots touched by
    // the extra key set; untouched chains stay bitwise identical.
    ScaleBF a(small_config(11, 5));
    ScaleBF b(small_config(11, 5));
    std::mt19937_64 rng(83);
    for (int i = 0; i < 3000; ++i) {
        const std::string k = testsup::rand_key(rng);
        a.insert(k);
        b.insert(k);
    }
    // only insert extras that route to slots {0,1,2}, so slots 3..10 are
    // guaranteed untouched and must stay bitwise identical
    int extras = 0;
    for (int i = 0; extras < 40 && i < 10000; ++i) {
        const std::string extra = "extra:" + std::to_string(i);
        if (b.route(extra) > 2) continue;
        b.insert(extra);
        ++extras;
    }
    ASSERT_EQ(extras, 40);

    for (std::uint64_t slot = 3; slot < 11; ++slot) {
        const auto ca = a.chain(slot);
        const auto cb = b.chain(slot);
        ASSERT_EQ(ca.size(), cb.size());
        for (std::size_t g = 0; g < ca.size(); ++g) {
            EXPECT_EQ(ca[g].inserted_count(), cb[g].inserted_count());
            for (int m = 0; m < 3; ++m) {
                EXPECT_TRUE(std::equal(ca[g].filter(m).cells().begin(),
                                       ca[g].filter(m).cells().end(),
                                       cb[g].filter(m).cells().begin()));
            }
        }
    }
}

TEST(ScaleBF, RestoreValidation) {
    const FilterConfig cfg = small_config(5, 3);
    ScaleBF s(cfg);
    std::mt19937_64 rng(89);
    for (int i = 0; i < 4000; ++i) s.insert(testsup::rand_key(rng));

    auto copy_chains = [&]() {
        std::vector<std::vector<FilterGroup>> chains;
        for (std::uint64_t slot = 0; slot < 5; ++slot) {
            chains.emplace_back(s.chain(slot).begin(), s.chain(slot).end());
        }
        return chains;
    };

    ScaleBF r = ScaleBF::restore(cfg, copy_chains());
    EXPECT_EQ(r.group_count(), s.group_count());
    EXPECT_EQ(r.key_count(), s.key_count());
    for (int i = 0; i < 2000; ++i) {
        const std::string probe = testsup::rand_key(rng);
        EXPECT_EQ(r.contains(probe), s.contains(probe));
    }

    auto too_few = copy_chains();
    too_few.pop_back();
    EXPECT_THROW(ScaleBF::restore(cfg, std::move(too_few)), std::invalid_argument);

    // swap a full group behind a partial one: breaks chain discipline
    auto reordered = copy_chains();
    for (auto& chain : reordered) {
        if (chain.size() >= 2 && !chain.back().is_full()) {
            std::swap(chain.front(), chain.back());
            EXPECT_THROW(ScaleBF::restore(cfg, std::move(reordered)), std::invalid_argument);
            break;
        }
    }

    // groups built under different dimensions are rejected
    auto alien = copy_chains();
    alien[0].clear();
    alien[0].emplace_back(Dim3{5, 11, 17}, 1, std::array<std::uint64_t, 3>{1, 2, 3});
    EXPECT_THROW(ScaleBF::restore(cfg, std::move(alien)), std::invalid_argument);

    // groups with a foreign capacity (different tau) are rejected
    auto alien_tau = copy_chains();
    alien_tau[0].clear();
    alien_tau[0].emplace_back(kSmall, 2, std::array<std::uint64_t, 3>{1, 2, 3});
    EXPECT_THROW(ScaleBF::restore(cfg, std::move(alien_tau)), std::invalid_argument);
}

TEST(ScaleBF, DoubleInsertLeavesBitsUnchanged) {
    // 300 distinct keys can produce at most 600 insertions in one slot,
    // below the 715-item group capacity, so duplicates can never spill into
    // a second group and the cell arrays must match the single-insert run.
    ScaleBF once(small_config(11, 13));
    ScaleBF twice(small_config(11, 13));
    std::mt19937_64 rng(97);
    std::vector<std::string> keys;
    for (int i = 0; i < 300; ++i) keys.push_back(testsup::rand_key(rng));
    for (const std::string& k : keys) once.insert(k);
    for (const std::string& k : keys) {
        twice.insert(k);
        twice.insert(k);
    }
    EXPECT_EQ(once.key_count(), 300u);
    EXPECT_EQ(twice.key_count(), 600u);
    EXPECT_EQ(twice.group_count(), once.group_count());
    for (std::uint64_t slot = 0; slot < 11; ++slot) {
        const auto c1 = once.chain(slot);
        const auto c2 = twice.chain(slot);
        ASSERT_EQ(c1.size(), c2.size());
        for (std::size_t g = 0; g < c1.size(); ++g) {
            EXPECT_EQ(c2[g].inserted_count(), 2 * c1[g].inserted_count());
            for (int m = 0; m < 3; ++m) {
                EXPECT_EQ(c1[g].filter(m).set_bit_count(), c2[g].filter(m).set_bit_count());
                EXPECT_TRUE(std::equal(c1[g].filter(m).cells().begin(),
                                       c1[g].filter(m).cells().end(),
                                       c2[g].filter(m).cells().begin()));
            }
        }
    }
    for (const std::string& k : keys) {
        EXPECT_TRUE(once.contains(k));
        EXPECT_TRUE(twice.contains(k));
    }
}

}  // namespace
