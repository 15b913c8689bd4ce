#pragma once

#include "mixedclust/dataset.hpp"
#include "mixedclust/distance.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixedclust {

enum class NullMode { UniformBox, Permute };

std::string to_string(NullMode mode);
NullMode parse_null_mode(std::string_view text);

struct NullOptions {
    NullMode mode = NullMode::UniformBox;
    /// Null sample size; max(n, 5000) when unset.
    std::optional<std::size_t> size;
    std::uint64_t seed = 0;

    std::size_t size_for(std::size_t n) const;
};

/// Per-attribute bounding box of the continuous part.
struct ContinuousBox {
    std::vector<double> lo;
    std::vector<double> hi;

    static ContinuousBox of(const MixedDataset& ds);
};

/// Rows drawn under the no-cluster hypothesis. Continuous values are kept
/// column-major so that distances to a reference vectorise over rows.
///
/// A uniform-box sample also keeps its unit draws. Distances to a reference
/// are then taken per coordinate against whichever mirror image of the box
/// puts the reference in its lower half; that has the same distribution and
/// makes nu exactly invariant under reflections, translations and coordinate
/// permutations of the data.
struct NullSample {
    std::size_t size = 0;
    std::size_t p = 0;
    std::size_t q = 0;
    std::vector<LevelCode> codes;  // size * p, row-major
    std::vector<double> columns;   // q * size, column-major
    std::vector<std::string> warnings;
    bool mirrored = false;
    ContinuousBox box;
    std::vector<double> unit;          // q * size, column-major draws in [0, 1)
    std::vector<std::size_t> order;    // coordinates by increasing box width

    std::span<const double> column(std::size_t j) const { return {columns.data() + j * size, size}; }
};

/// Expected HD vector and ED vector at one reference position.
struct NullProfile {
    std::vector<double> eps;
    std::vector<double> nu;
    double lattice_size = 1.0;
    std::size_t null_size = 0;
    std::uint64_t seed = 0;
};

/// e_0..e_k of the given values via the one-pass polynomial-product recurrence.
std::vector<double> elementary_symmetric(std::span<const double> values);

/// M = product of declared level counts.
double lattice_size(const Schema& schema);

/// Uniform HD vector eps = (n / M) U*, U*_k = e_k(m_1 - 1, ..., m_p - 1).
std::vector<double> uhd_vector(const Schema& schema, std::size_t n);

NullSample sample_null(const MixedDataset& ds, std::size_t null_size, std::uint64_t seed,
                       NullMode mode = NullMode::UniformBox);

/// Coordinates sorted by increasing box width, ties by index. Uniform
/// columns are drawn in this order.
std::vector<std::size_t> width_order(const ContinuousBox& box);

/// Uniform lattice x uniform box data set of n rows.
MixedDataset sample_uniform(const Schema& schema, std::size_t n, const ContinuousBox& box, std::uint64_t seed);

/// Distances from every null row to `ref`, written to `out` (resized to sample.size).
void null_distances(const NullSample& sample, std::span<const double> ref, std::vector<double>& out);

/// nu_j = n * (null count in bin j) / null size; null distances beyond the
/// last edge fall into the last bin.
std::vector<double> ued_vector(const NullSample& sample, std::span<const double> ref, const Bins& bins,
                               std::size_t n);
std::vector<double> ued_from_distances(std::span<const double> null_dist, const Bins& bins, std::size_t n);

/// eps for the current n plus the null sample used for nu. The null sample
/// is drawn from `reference` (its box, or its columns in permute mode) while
/// both vectors are scaled to the current row count n.
class NullModel {
public:
    NullModel(const MixedDataset& reference, std::size_t n, const NullOptions& options);
    NullModel(const MixedDataset& ds, const NullOptions& options) : NullModel(ds, ds.size(), options) {}

    const std::vector<double>& eps() const { return eps_; }
    const NullSample& sample() const { return sample_; }
    std::size_t n() const { return n_; }

    NullProfile profile(std::span<const double> ref, const Bins& bins) const;

private:
    std::size_t n_;
    double lattice_size_;
    std::uint64_t seed_;
    std::vector<double> eps_;
    NullSample sample_;
};

/// SplitMix64 mix of a base seed with stream indices.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace mixedclust
