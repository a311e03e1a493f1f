// Command-line front end: build, fill, query, and inspect filter images.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scalebf/scalebf.hpp"

namespace {

using nlohmann::json;

scalebf::Dim3 parse_dims(const std::vector<std::uint32_t>& dims) {
    if (dims.size() != 3)
        throw std::invalid_argument("--dims requires three comma-separated primes");
    return scalebf::Dim3{dims[0], dims[1], dims[2]};
}

// Applies `fn` to every newline-delimited key from the file (or stdin when
// the path is "-"). The key is the byte content of the line.
template <typename Fn>
void for_each_key(const std::string& path, Fn&& fn) {
    std::istream* in = &std::cin;
    std::ifstream file;
    if (path != "-") {
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open key file " + path);
        in = &file;
    }
    std::string line;
    while (std::getline(*in, line)) fn(line);
    if (in->bad()) throw std::runtime_error("read failure on key source " + path);
}

json config_to_json(const scalebf::FilterConfig& cfg) {
    return json{{"slots", cfg.slot_count},
                {"dims", {cfg.dims.x, cfg.dims.y, cfg.dims.z}},
                {"tau", cfg.tau},
                {"seed", cfg.master_seed}};
}

void print_config_text(std::ostream& out, const scalebf::FilterConfig& cfg) {
    out << "slots:        " << cfg.slot_count << "\n"
        << "dims:         " << cfg.dims.x << "," << cfg.dims.y << "," << cfg.dims.z << "\n"
        << "tau:          " << cfg.tau << "\n"
        << "seed:         " << cfg.master_seed << "\n"
        << "group cap:    " << cfg.group_capacity() << " keys\n"
        << "filter bits:  " << cfg.dims.bit_capacity() << " per member\n";
}

struct CommonFlags {
    std::string filter_path;
    std::string keys_path = "-";
    bool as_json = false;
};

void cmd_build(const scalebf::FilterConfig& cfg, const std::string& out_path, bool as_json) {
    scalebf::ScaleBF filter(cfg);
    scalebf::save_image_atomic(filter, out_path);
    if (as_json) {
        json j = config_to_json(cfg);
        j["path"] = out_path;
        j["groups"] = 0;
        j["keys"] = 0;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "created empty filter image " << out_path << "\n";
        print_config_text(std::cout, cfg);
    }
}

void cmd_insert(const CommonFlags& flags) {
    scalebf::ScaleBF filter = scalebf::load_image(flags.filter_path);
    const std::uint64_t groups_before = filter.group_count();
    std::uint64_t inserted = 0;
    for_each_key(flags.keys_path, [&](const std::string& key) {
        filter.insert(key);
        ++inserted;
    });
    scalebf::save_image_atomic(filter, flags.filter_path);
    const std::uint64_t groups_created = filter.group_count() - groups_before;
    if (flags.as_json) {
        json j{{"keys_inserted", inserted},
               {"groups_created", groups_created},
               {"total_keys", filter.key_count()},
               {"total_groups", filter.group_count()}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "inserted " << inserted << " keys (" << groups_created
                  << " new groups); filter now holds " << filter.key_count() << " keys in "
                  << filter.group_count() << " groups\n";
    }
}

void cmd_query(const CommonFlags& flags) {
    const scalebf::ScaleBF filter = scalebf::load_image(flags.filter_path);
    std::uint64_t present = 0;
    std::uint64_t absent = 0;
    std::ostream& out = std::cout;
    for_each_key(flags.keys_path, [&](const std::string& key) {
        const bool hit = filter.contains(key);
        ++(hit ? present : absent);
        out << key << '\t' << (hit ? "present" : "absent") << '\n';
    });
    out.flush();
    if (flags.as_json) {
        json j{{"present", present}, {"absent", absent}, {"queried", present + absent}};
        std::cerr << j.dump() << "\n";
    } else {
        std::cerr << "queried " << (present + absent) << " keys: " << present << " present, "
                  << absent << " absent\n";
    }
}

void cmd_stats(const CommonFlags& flags) {
    const scalebf::ScaleBF filter = scalebf::load_image(flags.filter_path);
    const scalebf::ScaleStats st = filter.stats();
    if (flags.as_json) {
        json j = config_to_json(filter.config());
        j["groups"] = st.group_count;
        j["keys"] = st.key_count;
        j["load_factor"] = st.load_factor;
        j["available_bits_eq"] = st.available_bits_eq;
        j["remaining_item_capacity"] = st.remaining_item_capacity;
        j["remaining_bit_capacity"] = st.remaining_bit_capacity;
        j["chain_lengths"] = st.chain_lengths;
        j["group_fill_ratios"] = st.group_fill_ratios;
        std::cout << j.dump(2) << "\n";
        return;
    }
    print_config_text(std::cout, filter.config());
    std::cout << "groups (Q):   " << st.group_count << "\n"
              << "keys:         " << st.key_count << "\n"
              << "load factor:  " << st.load_factor << " (groups per slot)\n"
              << "available bits (tau*x*y*z*Q/P): " << st.available_bits_eq << "\n"
              << "remaining capacity: " << st.remaining_item_capacity << " items ("
              << st.remaining_bit_capacity << " bits across members)\n";
    std::map<std::uint64_t, std::uint64_t> hist;
    for (std::uint64_t len : st.chain_lengths) ++hist[len];
    std::cout << "chain lengths:\n";
    for (const auto& [len, count] : hist)
        std::cout << "  length " << len << ": " << count << " slots\n";
    if (!st.group_fill_ratios.empty()) {
        double min_fill = 1.0;
        double max_fill = 0.0;
        double sum = 0.0;
        for (double f : st.group_fill_ratios) {
            min_fill = std::min(min_fill, f);
            max_fill = std::max(max_fill, f);
            sum += f;
        }
        std::cout << "group fill:   min " << min_fill << ", mean "
                  << sum / static_cast<double>(st.group_fill_ratios.size()) << ", max " << max_fill
                  << "\n";
    }
}

void cmd_fpp(const CommonFlags& flags, const std::string& mode, std::uint64_t trials,
             const std::string& probe_prefix) {
    const scalebf::ScaleBF filter = scalebf::load_image(flags.filter_path);
    const scalebf::FilterConfig& cfg = filter.config();
    const std::uint64_t bit_count = cfg.dims.bit_capacity();

    std::vector<double> group_fpps;
    std::vector<json> group_rows;
    double expected_lookup_sum = 0.0;
    for (std::uint64_t slot = 0; slot < cfg.slot_count; ++slot) {
        double chain_negative = 1.0;
        std::uint64_t ordinal = 0;
        for (const scalebf::FilterGroup& g : filter.chain(slot)) {
            const scalebf::FppReport rep = scalebf::analytic_report(cfg.dims, g.inserted_count());
            group_fpps.push_back(rep.group);
            chain_negative *= 1.0 - rep.group;
            group_rows.push_back(json{{"slot", slot},
                                      {"ordinal", ordinal},
                                      {"inserted", g.inserted_count()},
                                      {"fpp_classic", rep.classic},
                                      {"fpp_group", rep.group}});
            ++ordinal;
        }
        expected_lookup_sum += 1.0 - chain_negative;
    }
    const double avg_group_fpp =
        group_fpps.empty() ? 0.0 : scalebf::fpp_average(group_fpps);
    const double expected_lookup_fpp =
        expected_lookup_sum / static_cast<double>(cfg.slot_count);

    std::optional<scalebf::EmpiricalFpp> measured;
    if (mode == "empirical") measured = scalebf::empirical_fpp(filter, probe_prefix, trials);

    if (flags.as_json) {
        json j{{"bits_per_member", bit_count},
               {"groups", group_rows},
               {"avg_group_fpp", avg_group_fpp},
               {"expected_lookup_fpp", expected_lookup_fpp}};
        if (measured) {
            j["empirical"] = json{{"trials", measured->trials},
                                  {"positives", measured->positives},
                                  {"rate", measured->rate},
                                  {"ci99", {measured->interval99.lower, measured->interval99.upper}}};
        }
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::cout << "bits per member filter (m): " << bit_count << "\n";
    for (const json& row : group_rows) {
        std::cout << "slot " << row["slot"] << " group " << row["ordinal"] << ": n="
                  << row["inserted"] << "  per-filter fpp=" << std::scientific
                  << row["fpp_classic"].get<double>() << "  group fpp="
                  << row["fpp_group"].get<double>() << std::defaultfloat << "\n";
    }
    std::cout << std::scientific << "average group fpp:    " << avg_group_fpp << "\n"
              << "expected lookup fpp:   " << expected_lookup_fpp << std::defaultfloat << "\n";
    if (measured) {
        std::cout << "empirical: " << measured->positives << "/" << measured->trials
                  << " positives, rate " << std::scientific << measured->rate << " (99% interval ["
                  << measured->interval99.lower << ", " << measured->interval99.upper << "])"
                  << std::defaultfloat << "\n";
    }
}

void cmd_bench(const scalebf::BenchOptions& opts, bool as_json) {
    const std::vector<scalebf::BenchRow> rows = scalebf::run_bench(opts);
    if (as_json) {
        json arr = json::array();
        for (const scalebf::BenchRow& r : rows) {
            arr.push_back(json{{"keys", r.key_count},
                               {"insert_p50_ns", r.insert_p50_ns},
                               {"insert_p99_ns", r.insert_p99_ns},
                               {"lookup_p50_ns", r.lookup_p50_ns},
                               {"lookup_p99_ns", r.lookup_p99_ns},
                               {"insert_mkeys_per_s", r.insert_mkeys_per_s},
                               {"lookup_mkeys_per_s", r.lookup_mkeys_per_s},
                               {"mean_chain_length", r.mean_chain_length},
                               {"groups", r.group_count},
                               {"load_factor", r.load_factor}});
        }
        std::cout << arr.dump(2) << "\n";
        return;
    }
    std::cout << std::setw(10) << "keys" << std::setw(12) << "ins p50" << std::setw(12)
              << "ins p99" << std::setw(12) << "look p50" << std::setw(12) << "look p99"
              << std::setw(12) << "ins Mk/s" << std::setw(12) << "look Mk/s" << std::setw(8)
              << "Q" << std::setw(10) << "alpha" << "\n";
    for (const scalebf::BenchRow& r : rows) {
        std::cout << std::setw(10) << r.key_count << std::fixed << std::setprecision(1)
                  << std::setw(10) << r.insert_p50_ns << "ns" << std::setw(10) << r.insert_p99_ns
                  << "ns" << std::setw(10) << r.lookup_p50_ns << "ns" << std::setw(10)
                  << r.lookup_p99_ns << "ns" << std::setprecision(2) << std::setw(12)
                  << r.insert_mkeys_per_s << std::setw(12) << r.lookup_mkeys_per_s << std::setw(8)
                  << r.group_count << std::setprecision(3) << std::setw(10) << r.load_factor
                  << std::defaultfloat << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    CLI::App app{"scaleBF: a scalable approximate-membership filter"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "create an empty filter image");
    std::uint64_t slots = 0;
    std::vector<std::uint32_t> dims_in;
    std::uint32_t tau = 1;
    std::uint64_t seed = 0;
    std::string out_path;
    bool build_json = false;
    build->add_option("--slots", slots, "prime slot count P")->required();
    build->add_option("--dims", dims_in, "filter dimensions x,y,z (distinct primes, not 3 or 7)")
        ->delimiter(',')
        ->required();
    build->add_option("--tau", tau, "fullness threshold, items per cell, in [1,63]");
    build->add_option("--seed", seed, "master hash seed");
    build->add_option("--out", out_path, "output image path")->required();
    build->add_flag("--json", build_json, "machine-readable output");
    build->callback([&] {
        cmd_build(scalebf::FilterConfig{slots, parse_dims(dims_in), tau, seed}, out_path,
                  build_json);
    });

    // insert / query / stats share flags
    CommonFlags insert_flags;
    auto* insert = app.add_subcommand("insert", "insert newline-delimited keys into an image");
    insert->add_option("--filter", insert_flags.filter_path, "filter image path")->required();
    insert->add_option("--keys", insert_flags.keys_path, "key file, one key per line ('-' = stdin)");
    insert->add_flag("--json", insert_flags.as_json, "machine-readable output");
    insert->callback([&] { cmd_insert(insert_flags); });

    CommonFlags query_flags;
    auto* query = app.add_subcommand("query", "query keys; prints '<key>\\tpresent|absent' per key");
    query->add_option("--filter", query_flags.filter_path, "filter image path")->required();
    query->add_option("--keys", query_flags.keys_path, "key file, one key per line ('-' = stdin)");
    query->add_flag("--json", query_flags.as_json, "machine-readable summary");
    query->callback([&] { cmd_query(query_flags); });

    CommonFlags stats_flags;
    auto* stats = app.add_subcommand("stats", "report occupancy and capacity figures");
    stats->add_option("--filter", stats_flags.filter_path, "filter image path")->required();
    stats->add_flag("--json", stats_flags.as_json, "machine-readable output");
    stats->callback([&] { cmd_stats(stats_flags); });

    CommonFlags fpp_flags;
    std::string fpp_mode = "analytic";
    std::uint64_t trials = 1000000;
    std::string probe_prefix = "scalebf:fpp:negative";
    auto* fpp = app.add_subcommand("fpp", "analytic and empirical false-positive figures");
    fpp->add_option("--filter", fpp_flags.filter_path, "filter image path")->required();
    fpp->add_option("--mode", fpp_mode, "analytic | empirical")
        ->check(CLI::IsMember({"analytic", "empirical"}));
    fpp->add_option("--trials", trials, "probe count for empirical mode");
    fpp->add_option("--probe-prefix", probe_prefix,
                    "namespace for negative probes (must be disjoint from inserted keys)");
    fpp->add_flag("--json", fpp_flags.as_json, "machine-readable output");
    fpp->callback([&] { cmd_fpp(fpp_flags, fpp_mode, trials, probe_prefix); });

    scalebf::BenchOptions bench_opts;
    bench_opts.config = scalebf::FilterConfig{223, scalebf::Dim3{31, 37, 41}, 1, 1};
    std::vector<std::uint32_t> bench_dims = {31, 37, 41};
    bool bench_json = false;
    auto* bench = app.add_subcommand("bench", "insert/lookup latency across scales");
    bench->add_option("--scales", bench_opts.scales, "key counts, ascending (e.g. 100000,1000000)")
        ->delimiter(',')
        ->required();
    bench->add_option("--slots", bench_opts.config.slot_count, "prime slot count P");
    bench->add_option("--dims", bench_dims, "filter dimensions x,y,z")->delimiter(',');
    bench->add_option("--tau", bench_opts.config.tau, "fullness threshold");
    bench->add_option("--seed", bench_opts.config.master_seed, "master hash seed");
    bench->add_option("--samples", bench_opts.target_samples, "timed operations per phase");
    bench->add_flag("--json", bench_json, "machine-readable output");
    bench->callback([&] {
        bench_opts.config.dims = parse_dims(bench_dims);
        bench_opts.rng_seed = bench_opts.config.master_seed + 0x9e3779b97f4a7c15ULL;
        cmd_bench(bench_opts, bench_json);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
