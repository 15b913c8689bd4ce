// Runs the acceptance criteria and prints one PASS/FAIL line for each.
// Usage: acceptance [criterion numbers...]; no arguments runs all of them.

#include "commands.hpp"
#include "mixedclust/bench.hpp"
#include "mixedclust/cluster.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mixedclust;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

// Expected HD counts from walking the whole lattice.
std::vector<double> lattice_expectation(const std::vector<std::size_t>& m, const std::vector<std::size_t>& ref,
                                        std::size_t n) {
    std::vector<double> counts(m.size() + 1, 0.0);
    std::vector<std::size_t> cell(m.size(), 0);
    double total = 0.0;
    while (true) {
        std::size_t d = 0;
        for (std::size_t j = 0; j < m.size(); ++j) d += cell[j] != ref[j];
        counts[d] += 1.0;
        total += 1.0;
        std::size_t j = 0;
        while (j < m.size() && ++cell[j] == m[j]) cell[j++] = 0;
        if (j == m.size()) break;
    }
    for (auto& c : counts) c *= static_cast<double>(n) / total;
    return counts;
}

Verdict uhd_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(101);
    double worst = 0.0;
    bool sums_ok = true;
    for (int t = 0; t < 200; ++t) {
        const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        std::vector<std::size_t> m(p), ref(p);
        for (auto& x : m) x = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
        for (std::size_t j = 0; j < p; ++j) ref[j] = std::uniform_int_distribution<std::size_t>(0, m[j] - 1)(rng);
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 1000)(rng);
        const auto schema = testing_support::make_schema(m, 0);
        const auto eps = uhd_vector(schema, n);
        const auto oracle = lattice_expectation(m, ref, n);
        for (std::size_t k = 0; k < eps.size(); ++k)
            worst = std::max(worst, std::abs(eps[k] - oracle[k]) / std::abs(oracle[k]));
        std::vector<double> reduced;
        for (auto x : m) reduced.push_back(static_cast<double>(x) - 1.0);
        const auto e = elementary_symmetric(reduced);
        const double sum = std::accumulate(e.begin(), e.end(), 0.0);
        if (sum != lattice_size(schema)) sums_ok = false;
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-12 && sums_ok && secs < 10.0,
            fmt("max relative error %.3g over 200 schemas, %.2f s", worst, secs) +
                (sums_ok ? ", sum of U* equals M" : ", sum of U* differs from M")};
}

Verdict count_conservation() {
    std::mt19937_64 rng(202);
    std::size_t bad = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto schema = testing_support::random_schema(rng, 8, 6, 6);
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 120)(rng);
        const double spread = std::exp(std::uniform_real_distribution<double>(-5.0, 5.0)(rng));
        const auto ds = testing_support::random_dataset(schema, n, rng, spread);
        const std::size_t l = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
        for (std::size_t r = 0; r < n; r += std::max<std::size_t>(1, n / 5)) {
            const auto prof = distance_profile(ds, r, l);
            const auto hd = std::accumulate(prof.hd_counts.begin(), prof.hd_counts.end(), std::size_t{0});
            const auto ed = std::accumulate(prof.ed_counts.begin(), prof.ed_counts.end(), std::size_t{0});
            if (hd != n || ed != n) ++bad;
        }
    }
    return {bad == 0, std::to_string(bad) + " vectors with a wrong total"};
}

Verdict statistic_examples() {
    using C = std::vector<std::size_t>;
    using R = std::vector<double>;
    const double chi_c = chisq_categorical(C{3, 4, 1}, R{2, 4, 2}, 1);
    const double chi_d = chisq_continuous(C{5, 3, 0, 1}, R{2, 2, 2, 3}, 3).value;
    const double zero_c = chisq_categorical(C{1, 2, 1}, R{1, 2, 1}, 1);
    const double zero_d = chisq_continuous(C{2, 2, 2, 3}, R{2, 2, 2, 3}, 2).value;
    const bool ok = std::abs(chi_c - 1.0) <= 1e-12 && std::abs(chi_d - 25.0 / 3.0) <= 1e-12 * 25.0 / 3.0 &&
                    zero_c == 0.0 && zero_d == 0.0;
    return {ok, fmt("chi_c %.15g, chi_d %.15g, equality %g / %g", chi_c, chi_d, zero_c, zero_d)};
}

Verdict null_false_positives() {
    const auto start = Clock::now();
    std::size_t hits = 0;
    const std::size_t trials = 200;
    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(derive_seed(404, t));
        std::vector<std::size_t> levels(5);
        for (auto& m : levels) m = std::uniform_int_distribution<std::size_t>(4, 6)(rng);
        const auto schema = testing_support::make_schema(levels, 5);
        const ContinuousBox box{std::vector<double>(5, 0.0), std::vector<double>(5, 1.0)};
        const auto ds = sample_uniform(schema, 100, box, derive_seed(404, t, 1));
        ClusterConfig config;
        config.calib.alpha = 0.05;
        config.calib.replicates = 199;
        config.null.seed = derive_seed(404, t, 2);
        config.calib.seed = derive_seed(404, t, 3);
        if (!run_clustering(ds, config).clusters.empty()) ++hits;
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(trials);
    const double secs = seconds_since(start);
    return {rate <= 0.10 && secs < 15 * 60, fmt("%.0f of 200 runs found a cluster (rate %.3f), %.0f s", hits, rate, secs)};
}

Verdict table_reproduction(int table, double sigma2, double min_cr, double min_ig, double budget) {
    const auto start = Clock::now();
    BenchOptions options;
    options.replicates = 50;
    options.seed = 2024;
    const auto setting = table_setting(table, sigma2);
    double cr = 0.0, ig = 0.0;
    for (std::size_t r = 0; r < options.replicates; ++r) {
        const auto rec = run_replicate(setting, r, options, ClusterConfig{});
        cr += rec.cr;
        ig += rec.ig;
    }
    cr /= static_cast<double>(options.replicates);
    ig /= static_cast<double>(options.replicates);
    const double secs = seconds_since(start);
    return {cr >= min_cr && ig >= min_ig && secs < budget,
            fmt("mean CR %.4f, mean IG %.4f over 50 replicates, %.0f s", cr, ig, secs)};
}

// Level relabeling, or a translation + signed coordinate permutation.
MixedDataset transform(const MixedDataset& ds, std::mt19937_64& rng, bool relabel) {
    const auto& schema = ds.schema();
    std::vector<LevelCode> codes = ds.codes();
    std::vector<double> values = ds.values();
    std::vector<std::string> names = schema.continuous();
    if (relabel) {
        for (std::size_t j = 0; j < ds.p(); ++j) {
            std::vector<LevelCode> map(schema.level_counts()[j]);
            std::iota(map.begin(), map.end(), 0);
            std::shuffle(map.begin(), map.end(), rng);
            for (std::size_t i = 0; i < ds.size(); ++i) codes[i * ds.p() + j] = map[ds.categorical(i)[j]];
        }
        return MixedDataset(schema, ds.size(), codes, values);
    }
    const std::size_t q = ds.q();
    std::vector<std::size_t> perm(q);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> shift(q), sign(q);
    for (std::size_t j = 0; j < q; ++j) {
        shift[j] = std::uniform_real_distribution<double>(-20.0, 20.0)(rng);
        sign[j] = rng() & 1 ? -1.0 : 1.0;
        names[j] = schema.continuous()[perm[j]];
    }
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = 0; j < q; ++j) values[i * q + j] = sign[j] * ds.continuous(i)[perm[j]] + shift[j];
    return MixedDataset(Schema(schema.categorical(), names), ds.size(), codes, values);
}

Verdict invariance() {
    std::size_t differ = 0;
    const std::size_t instances = 50;
    for (std::size_t t = 0; t < instances; ++t) {
        SynthConfig synth;
        synth.p = 5;
        synth.q = 5;
        synth.sizes = {25, 15, 10};
        synth.sigma2 = 0.5;
        synth.seed = derive_seed(707, t);
        const auto data = gen_mixed(synth);
        ClusterConfig config;
        config.null.seed = derive_seed(707, t, 1);
        config.calib.seed = derive_seed(707, t, 2);
        const auto base = run_clustering(data.data, config).labels(data.data.size());
        std::mt19937_64 rng(derive_seed(707, t, 3));
        for (bool relabel : {true, false}) {
            const auto moved = transform(data.data, rng, relabel);
            if (run_clustering(moved, config).labels(moved.size()) != base) ++differ;
        }
    }
    return {differ == 0, std::to_string(differ) + " of " + std::to_string(2 * instances) +
                             " transformed runs changed the partition"};
}

Verdict determinism() {
    const fs::path dir = fs::temp_directory_path() / "mixedclust_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto call = [](std::vector<std::string> args) {
        args.insert(args.begin(), "mixedclust");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    };
    const std::string prefix = (dir / "data").string();
    bool ok = call({"synth", "--table1", "--seed", "3", "--out", prefix}) == 0;
    for (const char* threads : {"1", "8"})
        ok = ok && call({"cluster", "--input", prefix + ".csv", "--schema", prefix + ".schema.json", "--seed", "9",
                         "--threads", threads, "--out", (dir / (std::string("labels_") + threads + ".csv")).string()}) == 0;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const auto a = slurp(dir / "labels_1.csv");
    const auto b = slurp(dir / "labels_8.csv");
    const bool same = ok && !a.empty() && a == b;
    fs::remove_all(dir);
    return {same, same ? "label files identical at 1 and 8 threads" : "label files differ or a run failed"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria{
        {1, {"UHD oracle equivalence", uhd_oracle}},
        {2, {"count conservation fuzz", count_conservation}},
        {3, {"statistic correctness", statistic_examples}},
        {4, {"null false-positive control", null_false_positives}},
        {5, {"Table 1 reproduction", [] { return table_reproduction(1, 0.25, 0.93, 0.85, 20 * 60); }}},
        {6, {"Table 2 reproduction", [] { return table_reproduction(2, 0.5, 0.90, 0.0, 1e9); }}},
        {7, {"invariance suite", invariance}},
        {8, {"determinism across thread counts", determinism}},
    };
    std::set<int> chosen;
    for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
    if (chosen.empty())
        for (const auto& [k, v] : criteria) chosen.insert(k);

    int failures = 0;
    for (int k : chosen) {
        const auto it = criteria.find(k);
        if (it == criteria.end()) {
            std::printf("criterion %d: FAIL (unknown criterion)\n", k);
            ++failures;
            continue;
        }
        Verdict v;
        try {
            v = it->second.second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d: %s  %s: %s\n", k, v.pass ? "PASS" : "FAIL", it->second.first.c_str(),
                    v.detail.c_str());
        std::fflush(stdout);
        if (!v.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
