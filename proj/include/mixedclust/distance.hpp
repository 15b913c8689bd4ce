#pragma once

#include "mixedclust/dataset.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mixedclust {

/// Equal-width distance bins. Bin 1 is [0, b_1]; bin j > 1 is (b_{j-1}, b_j].
/// Edges are b_0 = 0 < b_1 < ... < b_l, except when every distance is zero,
/// in which case all edges are 0 and everything lands in bin 1.
struct Bins {
    std::vector<double> edges;  // l + 1 entries

    std::size_t count() const { return edges.empty() ? 0 : edges.size() - 1; }
    double upper() const { return edges.back(); }

    /// 0-based bin index of distance d, or count() when d > upper().
    std::size_t locate(double d) const;
};

/// HD vector U (p + 1 counts) and ED vector V (l counts) at one reference position.
struct DistanceProfile {
    std::vector<LevelCode> ref_cat;
    std::vector<double> ref_cont;
    std::vector<std::size_t> hd_counts;
    std::vector<std::size_t> ed_counts;
    Bins bins;
};

std::size_t hamming(std::span<const LevelCode> a, std::span<const LevelCode> b);
double euclidean(std::span<const double> a, std::span<const double> b);

std::vector<std::size_t> hd_vector(const MixedDataset& ds, std::span<const LevelCode> ref);

/// Euclidean distance from every row to `ref`, in row order.
std::vector<double> ed_distances(const MixedDataset& ds, std::span<const double> ref);

Bins make_bins(double max_distance, std::size_t l);
Bins make_bins(const MixedDataset& ds, std::span<const double> ref, std::size_t l);

/// Histogram of precomputed distances. Throws when a distance exceeds the last edge.
std::vector<std::size_t> bin_counts(std::span<const double> distances, const Bins& bins);
std::vector<std::size_t> ed_vector(const MixedDataset& ds, std::span<const double> ref, const Bins& bins);

DistanceProfile distance_profile(const MixedDataset& ds, std::size_t row, std::size_t l);

}  // namespace mixedclust
