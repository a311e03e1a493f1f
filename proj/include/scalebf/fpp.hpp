#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scalebf/scale_filter.hpp"

namespace scalebf {

/// Largest filter size (in bits) accepted by fpp_exact. Beyond this the
/// closed form fpp_classic is the estimator of record; for a single hash
/// function the two agree exactly anyway.
inline constexpr std::uint64_t kExactFppLimit = 512;

/// Largest insert count accepted by fpp_exact; the integer powers grow
/// linearly with n and a 512-bit filter is saturated long before this.
inline constexpr std::uint64_t kExactFppInsertLimit = 4096;

/// Classic occupancy false-positive probability for a single-hash Bloom
/// filter: 1 - (1 - 1/m)^n. Evaluated via expm1/log1p so it stays accurate
/// for bit counts and insert counts up to 2^40.
inline double fpp_classic(std::uint64_t bit_count, std::uint64_t inserted) {
    if (bit_count < 1) throw std::invalid_argument("bit count must be positive");
    if (inserted == 0) return 0.0;
    if (bit_count == 1) return 1.0;
    const double log_zero_prob =
        static_cast<double>(inserted) * std::log1p(-1.0 / static_cast<double>(bit_count));
    return -std::expm1(log_zero_prob);
}

/// Exact single-hash false-positive probability by conditioning on the
/// number of set bits X (Grandi's delta-transformation form):
///
///   FPP = sum_{x=0}^{m} (x/m) C(m,x) sum_{j=0}^{x} (-1)^j C(x,j) ((x-j)/m)^n
///
/// The alternating binomial sums overflow and cancel catastrophically in
/// floating point, so everything is evaluated in exact integer arithmetic
/// as N / m^(n+1) and converted to double at the end. Restricted to
/// m <= kExactFppLimit.
inline double fpp_exact(std::uint64_t bit_count, std::uint64_t inserted) {
    using boost::multiprecision::cpp_int;
    if (bit_count < 1) throw std::invalid_argument("bit count must be positive");
    if (bit_count > kExactFppLimit)
        throw std::invalid_argument("bit count exceeds exact evaluation limit (512); use fpp_classic");
    if (inserted > kExactFppInsertLimit)
        throw std::invalid_argument("insert count exceeds exact evaluation limit; use fpp_classic");
    if (inserted == 0) return 0.0;

    const unsigned m = static_cast<unsigned>(bit_count);
    const unsigned n = static_cast<unsigned>(inserted);

    std::vector<cpp_int> pow_n(m + 1);  // pow_n[v] = v^n
    for (unsigned v = 0; v <= m; ++v) pow_n[v] = boost::multiprecision::pow(cpp_int(v), n);

    cpp_int numerator = 0;
    cpp_int binom_mx = 1;  // C(m, x), updated incrementally
    for (unsigned x = 1; x <= m; ++x) {
        binom_mx = binom_mx * (m - x + 1) / x;
        cpp_int inner = 0;
        cpp_int binom_xj = 1;  // C(x, j)
        for (unsigned j = 0; j <= x; ++j) {
            if (j > 0) binom_xj = binom_xj * (x - j + 1) / j;
            const cpp_int term = binom_xj * pow_n[x - j];
            if (j & 1)
                inner -= term;
            else
                inner += term;
        }
        numerator += x * binom_mx * inner;
    }

    const cpp_int denominator = boost::multiprecision::pow(cpp_int(m), n + 1);
    boost::multiprecision::cpp_rational fpp(numerator, denominator);
    return fpp.convert_to<double>();
}

/// Group false-positive probability: the product of the three member
/// probabilities (membership is the conjunction of three filters).
inline double fpp_group(const std::array<double, 3>& per_filter) {
    for (double p : per_filter) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability outside [0,1]");
    }
    return per_filter[0] * per_filter[1] * per_filter[2];
}

/// Unweighted arithmetic mean over the groups present.
inline double fpp_average(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("cannot average an empty sequence");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

/// Occupancy figures for a structure with the given per-group insert
/// counts. `available_bits_eq` is the headline capacity figure
/// tau*x*y*z*Q/P; the remaining_* fields count how many further insertions
/// the existing groups accept (items, and bits at three per item).
struct CapacityReport {
    double load_factor = 0.0;
    double available_bits_eq = 0.0;
    std::uint64_t remaining_item_capacity = 0;
    std::uint64_t remaining_bit_capacity = 0;
};

inline CapacityReport capacity_report(const FilterConfig& config,
                                      std::span<const std::uint64_t> inserted_per_group) {
    config.validate();
    const std::uint64_t capacity = config.group_capacity();
    CapacityReport r;
    r.load_factor = static_cast<double>(inserted_per_group.size()) /
                    static_cast<double>(config.slot_count);
    r.available_bits_eq = static_cast<double>(capacity) * r.load_factor;
    for (std::uint64_t inserted : inserted_per_group) {
        if (inserted > capacity)
            throw std::invalid_argument("group inserted count exceeds capacity");
        r.remaining_item_capacity += capacity - inserted;
    }
    r.remaining_bit_capacity = r.remaining_item_capacity * kFiltersPerGroup;
    return r;
}

/// 99% confidence interval on a rate from an observed positive count
/// (exact Poisson/Garwood bounds via chi-squared quantiles).
struct RateInterval {
    double lower = 0.0;
    double upper = 0.0;
};

inline RateInterval poisson_rate_interval(std::uint64_t positives, std::uint64_t trials,
                                          double coverage = 0.99) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    if (coverage <= 0.0 || coverage >= 1.0) throw std::invalid_argument("coverage outside (0,1)");
    const double alpha = 1.0 - coverage;
    const double c = static_cast<double>(positives);
    RateInterval iv;
    if (positives > 0) {
        boost::math::chi_squared lower_dist(2.0 * c);
        iv.lower = 0.5 * boost::math::quantile(lower_dist, alpha / 2.0);
    }
    boost::math::chi_squared upper_dist(2.0 * c + 2.0);
    iv.upper = 0.5 * boost::math::quantile(upper_dist, 1.0 - alpha / 2.0);
    iv.lower /= static_cast<double>(trials);
    iv.upper /= static_cast<double>(trials);
    return iv;
}

/// Result of an empirical false-positive measurement.
struct EmpiricalFpp {
    std::uint64_t trials = 0;
    std::uint64_t positives = 0;
    double rate = 0.0;
    RateInterval interval99;
};

/// Deterministic key for position `index` of a named disjoint key space.
/// Streams with different prefixes never produce equal keys, so negative
/// probes stay disjoint from inserted keys by prefix discipline alone.
inline std::string namespaced_key(std::string_view prefix, std::uint64_t index) {
    std::string key(prefix);
    key += ':';
    key += std::to_string(index);
    return key;
}

/// Queries `trials` keys from the given namespace against any filter-like
/// object (Bloom3D, FilterGroup, or ScaleBF) and reports the positive rate
/// with its 99% Poisson interval. The caller guarantees the namespace is
/// disjoint from every inserted key.
template <typename Filter>
EmpiricalFpp empirical_fpp(const Filter& filter, std::string_view key_namespace,
                           std::uint64_t trials) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    EmpiricalFpp result;
    result.trials = trials;
    std::string key(key_namespace);
    key += ':';
    const std::size_t prefix_len = key.size();
    for (std::uint64_t i = 0; i < trials; ++i) {
        key.resize(prefix_len);
        key += std::to_string(i);  // same bytes as namespaced_key(key_namespace, i)
        if (filter.contains(key)) ++result.positives;
    }
    result.rate = static_cast<double>(result.positives) / static_cast<double>(trials);
    result.interval99 = poisson_rate_interval(result.positives, trials);
    return result;
}

/// Analytic figures for one filter group at a given fill level.
struct FppReport {
    std::uint64_t bit_count = 0;              ///< m, per member filter
    std::uint64_t inserted = 0;               ///< n, per member filter
    double classic = 0.0;                     ///< per-filter closed form
    std::optional<double> exact;              ///< present when m <= kExactFppLimit
    double group = 0.0;                       ///< product over the three members
    std::optional<EmpiricalFpp> empirical;
};

inline FppReport analytic_report(const Dim3& dims, std::uint64_t inserted) {
    FppReport rep;
    rep.bit_count = dims.bit_capacity();
    rep.inserted = inserted;
    rep.classic = fpp_classic(rep.bit_count, inserted);
    if (rep.bit_count <= kExactFppLimit) rep.exact = fpp_exact(rep.bit_count, inserted);
    rep.group = fpp_group({rep.classic, rep.classic, rep.classic});
    return rep;
}

}  // namespace scalebf
