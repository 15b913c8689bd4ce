#pragma once

#include "mixedclust/cluster.hpp"
#include "mixedclust/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mixedclust {

struct SynthConfig {
    std::size_t p = 10;
    std::size_t q = 10;
    std::vector<std::size_t> level_pool{4, 5, 6};
    std::vector<std::size_t> sizes{100, 75, 25};
    double center_prob = 0.7;
    double sigma2 = 0.25;
    /// Continuous center k sits at (gap * k, ..., gap * k).
    double center_gap = 3.0;
    std::uint64_t seed = 1;

    std::size_t clusters() const { return sizes.size(); }
};

struct LabeledDataset {
    MixedDataset data;
    std::vector<int> truth;  // 1..K per row
};

LabeledDataset gen_mixed(const SynthConfig& config);

/// Agreement under the best one-to-one matching of predicted clusters to
/// true clusters, divided by n. Label 0 in `pred` never matches.
double classification_rate(std::span<const int> truth, std::span<const int> pred);

/// Uncertainty coefficient (H(T) - H(T | P)) / H(T) in bits. Label 0 in
/// `pred` is an ordinary group.
double information_gain(std::span<const int> truth, std::span<const int> pred);

/// Maximum-weight perfect matching on a square matrix (Hungarian method).
/// Returns the column assigned to each row.
std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weight);

/// A row of the simulation tables.
struct BenchSetting {
    std::string name;
    std::vector<std::size_t> sizes;
    double sigma2 = 0.25;
};

/// The four table layouts crossed with variances 0.25, 0.5 and 1.
std::vector<BenchSetting> table_settings();
BenchSetting table_setting(int table, double sigma2);

struct BenchRecord {
    std::size_t replicate = 0;
    std::string setting;
    double cr = 0.0;
    double ig = 0.0;
    std::size_t clusters_found = 0;
    double runtime_ms = 0.0;
    // Categorical-only and continuous-only runs; NaN when not requested.
    double cr_cat = 0.0;
    double ig_cat = 0.0;
    double cr_cont = 0.0;
    double ig_cont = 0.0;
};

struct BenchOptions {
    std::size_t replicates = 50;
    std::uint64_t seed = 1;
    bool per_portion = false;
    SynthConfig synth;  // sizes / sigma2 replaced per setting
};

BenchRecord run_replicate(const BenchSetting& setting, std::size_t replicate, const BenchOptions& options,
                          const ClusterConfig& cluster);

std::vector<BenchRecord> run_bench(std::span<const BenchSetting> settings, const BenchOptions& options,
                                   const ClusterConfig& cluster);

/// CSV with one line per replicate followed by mean and sd rows per setting.
std::string bench_report_csv(std::span<const BenchRecord> records, bool per_portion);

MixedDataset categorical_part(const MixedDataset& ds);
MixedDataset continuous_part(const MixedDataset& ds);

}  // namespace mixedclust
