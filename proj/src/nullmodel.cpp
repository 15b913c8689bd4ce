#include "mixedclust/nullmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mixedclust {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t bound) {
    return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng);
}

void fill_uniform_codes(const Schema& schema, std::size_t rows, std::mt19937_64& rng,
                        std::vector<LevelCode>& codes) {
    const auto m = schema.level_counts();
    codes.resize(rows * m.size());
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            codes[i * m.size() + j] = static_cast<LevelCode>(uniform_index(rng, m[j]));
}

}  // namespace

std::string to_string(NullMode mode) {
    return mode == NullMode::UniformBox ? "uniform-box" : "permute";
}

NullMode parse_null_mode(std::string_view text) {
    if (text == "uniform-box") return NullMode::UniformBox;
    if (text == "permute") return NullMode::Permute;
    throw Error("unknown null mode '" + std::string(text) + "' (expected uniform-box or permute)");
}

std::size_t NullOptions::size_for(std::size_t n) const {
    if (size) return std::max<std::size_t>(*size, 1);
    return std::max<std::size_t>(n, 5000);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

ContinuousBox ContinuousBox::of(const MixedDataset& ds) {
    ContinuousBox box;
    box.lo.assign(ds.q(), 0.0);
    box.hi.assign(ds.q(), 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto z = ds.continuous(i);
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (i == 0 || z[j] < box.lo[j]) box.lo[j] = z[j];
            if (i == 0 || z[j] > box.hi[j]) box.hi[j] = z[j];
        }
    }
    return box;
}

std::vector<double> elementary_symmetric(std::span<const double> values) {
    // Coefficients of prod_j (1 + v_j t), built one factor at a time.
    std::vector<double> e(values.size() + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t j = 0; j < values.size(); ++j)
        for (std::size_t k = j + 1; k >= 1; --k) e[k] += values[j] * e[k - 1];
    return e;
}

double lattice_size(const Schema& schema) {
    double m = 1.0;
    for (auto count : schema.level_counts()) m *= static_cast<double>(count);
    return m;
}

std::vector<double> uhd_vector(const Schema& schema, std::size_t n) {
    std::vector<double> reduced;
    for (auto count : schema.level_counts()) reduced.push_back(static_cast<double>(count) - 1.0);
    auto eps = elementary_symmetric(reduced);
    const double scale = static_cast<double>(n) / lattice_size(schema);
    for (auto& e : eps) e *= scale;
    return eps;
}

NullSample sample_null(const MixedDataset& ds, std::size_t null_size, std::uint64_t seed, NullMode mode) {
    if (null_size < 1) throw Error("sample_null: null size must be at least 1");
    NullSample sample;
    sample.size = null_size;
    sample.p = ds.p();
    sample.q = ds.q();
    std::mt19937_64 rng(seed);
    fill_uniform_codes(ds.schema(), null_size, rng, sample.codes);

    sample.columns.resize(sample.q * null_size);
    if (sample.q == 0) return sample;
    if (ds.size() == 0) throw Error("sample_null: empty dataset");

    const auto box = ContinuousBox::of(ds);
    const std::size_t n = ds.size();
    for (std::size_t j = 0; j < sample.q; ++j)
        if (box.lo[j] == box.hi[j])
            sample.warnings.push_back("continuous attribute '" + ds.schema().continuous()[j] +
                                      "' is constant; its null coordinate is constant too");

    if (mode == NullMode::UniformBox) {
        sample.mirrored = true;
        sample.box = box;
        sample.order = width_order(box);
        sample.unit.resize(sample.q * null_size);
        for (auto j : sample.order) {
            double* u = sample.unit.data() + j * null_size;
            double* col = sample.columns.data() + j * null_size;
            const double width = box.hi[j] - box.lo[j];
            for (std::size_t i = 0; i < null_size; ++i) {
                u[i] = uniform01(rng);
                col[i] = box.lo[j] + width * u[i];
            }
        }
        return sample;
    }

    std::vector<double> observed(n);
    for (std::size_t j = 0; j < sample.q; ++j) {
        double* col = sample.columns.data() + j * null_size;
        for (std::size_t i = 0; i < n; ++i) observed[i] = ds.continuous(i)[j];
        std::size_t filled = 0;
        while (null_size - filled >= n) {
            std::shuffle(observed.begin(), observed.end(), rng);
            std::copy(observed.begin(), observed.end(), col + filled);
            filled += n;
        }
        for (; filled < null_size; ++filled) col[filled] = observed[uniform_index(rng, n)];
    }
    return sample;
}

std::vector<std::size_t> width_order(const ContinuousBox& box) {
    std::vector<std::size_t> order(box.lo.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return box.hi[a] - box.lo[a] < box.hi[b] - box.lo[b];
    });
    return order;
}

MixedDataset sample_uniform(const Schema& schema, std::size_t n, const ContinuousBox& box, std::uint64_t seed) {
    const std::size_t q = schema.q();
    if (box.lo.size() != q || box.hi.size() != q) throw Error("sample_uniform: box does not match schema");
    std::mt19937_64 rng(seed);
    std::vector<LevelCode> codes;
    fill_uniform_codes(schema, n, rng, codes);
    std::vector<double> values(n * q);
    for (auto j : width_order(box)) {
        const double width = box.hi[j] - box.lo[j];
        for (std::size_t i = 0; i < n; ++i) values[i * q + j] = box.lo[j] + width * uniform01(rng);
    }
    return MixedDataset(schema, n, std::move(codes), std::move(values));
}

void null_distances(const NullSample& sample, std::span<const double> ref, std::vector<double>& out) {
    if (ref.size() != sample.q) throw Error("null_distances: reference does not match sample");
    out.assign(sample.size, 0.0);
    double* d = out.data();
    if (sample.mirrored) {
        for (auto j : sample.order) {
            const double* u = sample.unit.data() + j * sample.size;
            const double width = sample.box.hi[j] - sample.box.lo[j];
            const double s = ref[j] - sample.box.lo[j];
            const double t = std::min(s, width - s);
            for (std::size_t i = 0; i < sample.size; ++i) {
                const double diff = width * u[i] - t;
                d[i] += diff * diff;
            }
        }
        for (std::size_t i = 0; i < sample.size; ++i) d[i] = std::sqrt(d[i]);
        return;
    }
    for (std::size_t j = 0; j < sample.q; ++j) {
        const double* col = sample.columns.data() + j * sample.size;
        const double t = ref[j];
        for (std::size_t i = 0; i < sample.size; ++i) {
            const double diff = col[i] - t;
            d[i] += diff * diff;
        }
    }
    for (std::size_t i = 0; i < sample.size; ++i) d[i] = std::sqrt(d[i]);
}

std::vector<double> ued_from_distances(std::span<const double> null_dist, const Bins& bins, std::size_t n) {
    const std::size_t l = bins.count();
    std::vector<std::size_t> counts(l, 0);
    for (double d : null_dist) ++counts[std::min(bins.locate(d), l - 1)];
    std::vector<double> nu(l);
    const double scale = static_cast<double>(n) / static_cast<double>(null_dist.size());
    for (std::size_t j = 0; j < l; ++j) nu[j] = scale * static_cast<double>(counts[j]);
    return nu;
}

std::vector<double> ued_vector(const NullSample& sample, std::span<const double> ref, const Bins& bins,
                               std::size_t n) {
    std::vector<double> d;
    null_distances(sample, ref, d);
    return ued_from_distances(d, bins, n);
}

NullModel::NullModel(const MixedDataset& reference, std::size_t n, const NullOptions& options)
    : n_(n),
      lattice_size_(lattice_size(reference.schema())),
      seed_(options.seed),
      eps_(uhd_vector(reference.schema(), n)),
      sample_(sample_null(reference, options.size_for(n), options.seed, options.mode)) {}

NullProfile NullModel::profile(std::span<const double> ref, const Bins& bins) const {
    NullProfile out;
    out.eps = eps_;
    if (sample_.q > 0) out.nu = ued_vector(sample_, ref, bins, n_);
    out.lattice_size = lattice_size_;
    out.null_size = sample_.size;
    out.seed = seed_;
    return out;
}

}  // namespace mixedclust
