#pragma once

#include "mixedclust/dataset.hpp"
#include "mixedclust/nullmodel.hpp"
#include "mixedclust/stat.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixedclust {

/// How the categorical and continuous radius conditions combine.
enum class Membership { And, Or };

std::string to_string(Membership rule);
Membership parse_membership(std::string_view text);

struct ClusterConfig {
    StatOptions stat;
    NullOptions null;
    CalibrationOptions calib;
    /// Skips calibration and compares against this value instead.
    std::optional<double> fixed_threshold;
    /// 0 turns the jump search off: R_d is then the largest distance inside the cut-off window.
    double jump_factor = 0.0;
    Membership membership = Membership::Or;
    std::size_t min_cluster_size = 2;
};

struct Cluster {
    std::size_t center_row = 0;
    std::vector<LevelCode> center_cat;
    std::vector<double> center_cont;
    std::size_t radius_cat = 0;
    double radius_cont = 0.0;
    std::vector<std::size_t> members;  // original row indices, ascending
    TestResult stat;
};

/// What one pass of the extraction loop saw at its winning center.
struct IterationRecord {
    std::size_t iteration = 0;
    std::size_t remaining = 0;
    std::size_t center_row = 0;
    TestResult stat;
    double max_score = 0.0;
    double threshold = 0.0;
    bool significant = false;
    /// Set when the extraction was smaller than min_cluster_size and went to unassigned.
    bool undersized = false;
    std::size_t radius_cat = 0;
    double radius_cont = 0.0;
    std::size_t extracted = 0;
    std::vector<std::size_t> hd_counts;
    std::vector<double> eps;
    std::vector<std::size_t> ed_counts;
    std::vector<double> nu;
    std::vector<double> bin_edges;
    std::vector<double> sorted_distances;
};

struct ClusterResult {
    std::vector<Cluster> clusters;
    std::vector<std::size_t> unassigned;
    std::vector<IterationRecord> iterations;

    /// Per-row label: k for the k-th extracted cluster (1-based), 0 for unassigned.
    std::vector<int> labels(std::size_t n) const;
};

struct CenterChoice {
    std::size_t row = 0;
    TestResult stat;
    double score = 0.0;
};

/// Arg-max of the selection score over the scan, ties to the smallest row.
CenterChoice best_center(std::span<const TestResult> scan, std::optional<double> threshold);
CenterChoice best_center(const MixedDataset& ds, const NullModel& null, const StatOptions& options,
                         std::optional<double> threshold = std::nullopt);

/// First strict interior local minimum of U, minus one; `fallback` when there is none.
std::size_t radius_categorical(std::span<const std::size_t> hd_counts, std::size_t fallback);

/// First jump among the sorted distances up to the upper edge of bin r_d.
/// A jump is a gap wider than jump_factor times the median positive gap.
/// With jump_factor <= 0 no jump is searched for.
double radius_continuous(std::span<const double> sorted_distances, const Bins& bins, std::size_t r_d,
                         double jump_factor = 5.0);

/// Rows within both radii of the center (or either, for Membership::Or).
std::vector<std::size_t> extract(const MixedDataset& ds, std::span<const LevelCode> center_cat,
                                 std::span<const double> center_cont, std::size_t radius_cat,
                                 double radius_cont, Membership rule = Membership::And);

ClusterResult run_clustering(const MixedDataset& ds, const ClusterConfig& config);

}  // namespace mixedclust
