#pragma once

#include "mixedclust/dataset.hpp"
#include "mixedclust/nullmodel.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mixedclust {

struct StatOptions {
    std::size_t bins = 10;
    /// Apply the categorical "- 1" to the continuous cut-off as well.
    bool continuous_minus_one = false;
    /// Expected count used for window bins whose null frequency is zero.
    double zero_floor = 0.5;
};

struct CalibrationOptions {
    double alpha = 0.05;
    std::size_t replicates = 199;
    std::uint64_t seed = 0;
};

struct ContinuousChiSquare {
    double value = 0.0;        // +inf when the tail is empty
    double window = 0.0;       // finite window part alone
    bool tail_empty = false;
};

/// Cut-offs and statistics at one reference position. r_c is a Hamming
/// distance in [0, p-1]; r_d is a 1-based bin index in [1, l-1].
struct TestResult {
    std::size_t r_c = 0;
    std::size_t r_d = 0;
    double chi_c = 0.0;
    double chi_d = 0.0;
    double chi_w = 0.0;
    bool tail_empty = false;
    /// chi_w with the continuous tail term dropped; equals chi_w when the tail is nonempty.
    double chi_w_window = 0.0;
};

struct Threshold {
    double alpha = 0.05;
    double value = 0.0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    bool fixed = false;
    std::vector<double> null_maxima;  // sorted ascending
};

std::size_t cutoff_categorical(std::span<const std::size_t> hd_counts, std::span<const double> eps);
std::size_t cutoff_continuous(std::span<const std::size_t> ed_counts, std::span<const double> nu,
                              bool minus_one = false);

double chisq_categorical(std::span<const std::size_t> hd_counts, std::span<const double> eps, std::size_t r_c);
ContinuousChiSquare chisq_continuous(std::span<const std::size_t> ed_counts, std::span<const double> nu,
                                     std::size_t r_d, double zero_floor = 0.5);
double chisq_weighted(double chi_c, double chi_d, std::size_t p, std::size_t q);

/// Full test at one position from its distance and null vectors. Either
/// part may be empty when p = 0 or q = 0.
TestResult test_position(std::span<const std::size_t> hd_counts, std::span<const double> eps,
                         std::span<const std::size_t> ed_counts, std::span<const double> nu,
                         std::size_t p, std::size_t q, const StatOptions& options);

/// Test at every row of `ds` used as reference position. Data-parallel over
/// rows; the output does not depend on the thread count.
std::vector<TestResult> scan_positions(const MixedDataset& ds, const NullModel& null, const StatOptions& options);

/// Score used to rank positions. A position with an empty continuous tail
/// counts as maximal evidence when its window statistic reaches the
/// threshold, and is ignored otherwise. Without a threshold the window
/// statistic is used as is.
double selection_score(const TestResult& result, std::optional<double> threshold);

/// (B + 1)(1 - alpha), validated to be an integer rank within 1..B.
std::size_t calibration_rank(double alpha, std::size_t replicates);

/// Monte-Carlo critical value for the maximum weighted statistic over all
/// rows of a no-cluster data set of n rows drawn uniformly on the lattice
/// and on the bounding box of `reference`. Each replicate draws its own null
/// sample from `reference` exactly as a clustering run does.
Threshold calibrate_threshold(const MixedDataset& reference, std::size_t n, const StatOptions& stat,
                              const NullOptions& null, const CalibrationOptions& calib);

}  // namespace mixedclust
