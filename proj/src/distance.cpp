#include "mixedclust/distance.hpp"

#include <algorithm>
#include <cmath>

namespace mixedclust {

std::size_t Bins::locate(double d) const {
    const std::size_t l = count();
    if (d > edges[l]) return l;
    if (edges[l] == 0.0) return 0;
    // First guess from the equal width, then settle against the stored edges
    // so that a distance equal to an interior edge stays in the lower bin.
    const double width = edges[l] / static_cast<double>(l);
    auto j = static_cast<std::size_t>(std::ceil(d / width));
    j = std::clamp<std::size_t>(j, 1, l);
    while (j > 1 && d <= edges[j - 1]) --j;
    while (j < l && d > edges[j]) ++j;
    return j - 1;
}

std::size_t hamming(std::span<const LevelCode> a, std::span<const LevelCode> b) {
    if (a.size() != b.size()) throw Error("hamming: length mismatch");
    std::size_t d = 0;
    for (std::size_t j = 0; j < a.size(); ++j) d += a[j] != b[j];
    return d;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("euclidean: length mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<std::size_t> hd_vector(const MixedDataset& ds, std::span<const LevelCode> ref) {
    if (ref.size() != ds.p()) throw Error("hd_vector: reference does not match schema");
    std::vector<std::size_t> counts(ds.p() + 1, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) ++counts[hamming(ds.categorical(i), ref)];
    return counts;
}

std::vector<double> ed_distances(const MixedDataset& ds, std::span<const double> ref) {
    if (ref.size() != ds.q()) throw Error("ed_distances: reference does not match schema");
    std::vector<double> out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) out[i] = euclidean(ds.continuous(i), ref);
    return out;
}

Bins make_bins(double max_distance, std::size_t l) {
    if (l < 1) throw Error("make_bins: bin count must be at least 1");
    if (!(max_distance >= 0.0) || !std::isfinite(max_distance)) throw Error("make_bins: bad maximum distance");
    Bins bins;
    bins.edges.resize(l + 1);
    const double width = max_distance / static_cast<double>(l);
    for (std::size_t j = 0; j < l; ++j) bins.edges[j] = width * static_cast<double>(j);
    bins.edges[l] = max_distance;
    return bins;
}

Bins make_bins(const MixedDataset& ds, std::span<const double> ref, std::size_t l) {
    const auto d = ed_distances(ds, ref);
    const double d_max = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
    return make_bins(d_max, l);
}

std::vector<std::size_t> bin_counts(std::span<const double> distances, const Bins& bins) {
    std::vector<std::size_t> counts(bins.count(), 0);
    for (double d : distances) {
        const auto j = bins.locate(d);
        if (j == bins.count()) throw Error("ed_vector: distance exceeds the last bin edge");
        ++counts[j];
    }
    return counts;
}

std::vector<std::size_t> ed_vector(const MixedDataset& ds, std::span<const double> ref, const Bins& bins) {
    const auto d = ed_distances(ds, ref);
    return bin_counts(d, bins);
}

DistanceProfile distance_profile(const MixedDataset& ds, std::size_t row, std::size_t l) {
    DistanceProfile profile;
    const auto x = ds.categorical(row);
    const auto z = ds.continuous(row);
    profile.ref_cat.assign(x.begin(), x.end());
    profile.ref_cont.assign(z.begin(), z.end());
    profile.hd_counts = hd_vector(ds, x);
    if (ds.q() > 0) {
        const auto d = ed_distances(ds, z);
        profile.bins = make_bins(d.empty() ? 0.0 : *std::max_element(d.begin(), d.end()), l);
        profile.ed_counts = bin_counts(d, profile.bins);
    }
    return profile;
}

}  // namespace mixedclust
