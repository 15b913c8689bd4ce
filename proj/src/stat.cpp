#include "mixedclust/stat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mixedclust {

std::size_t cutoff_categorical(std::span<const std::size_t> hd_counts, std::span<const double> eps) {
    if (hd_counts.size() != eps.size() || hd_counts.size() < 2)
        throw Error("cutoff_categorical: need matching vectors of length p + 1 >= 2");
    const std::size_t p = hd_counts.size() - 1;
    for (std::size_t j = 1; j <= p; ++j)
        if (static_cast<double>(hd_counts[j]) < eps[j]) return j - 1;
    return p - 1;
}

std::size_t cutoff_continuous(std::span<const std::size_t> ed_counts, std::span<const double> nu, bool minus_one) {
    if (ed_counts.size() != nu.size() || ed_counts.size() < 2)
        throw Error("cutoff_continuous: need matching vectors with at least 2 bins");
    const std::size_t l = ed_counts.size();
    // 1-based j in [2, l-1]; a crossing in the last bin would leave no tail.
    for (std::size_t j = 2; j + 1 <= l; ++j) {
        const double expected = nu[j - 1];
        if (expected <= 0.0) continue;
        if (static_cast<double>(ed_counts[j - 1]) < expected) return minus_one ? j - 1 : j;
    }
    return l - 1;
}

double chisq_categorical(std::span<const std::size_t> hd_counts, std::span<const double> eps, std::size_t r_c) {
    if (hd_counts.size() != eps.size()) throw Error("chisq_categorical: length mismatch");
    const std::size_t p = hd_counts.size() - 1;
    if (r_c + 1 > p) throw Error("chisq_categorical: cut-off leaves an empty tail");
    double chi = 0.0;
    double observed = 0.0;
    double expected = 0.0;
    for (std::size_t j = 0; j <= r_c; ++j) {
        const double u = static_cast<double>(hd_counts[j]);
        const double diff = u - eps[j];
        chi += diff * diff / eps[j];
        observed += u;
        expected += eps[j];
    }
    double tail = 0.0;
    for (std::size_t j = r_c + 1; j <= p; ++j) tail += eps[j];
    const double diff = observed - expected;
    return chi + diff * diff / tail;
}

ContinuousChiSquare chisq_continuous(std::span<const std::size_t> ed_counts, std::span<const double> nu,
                                     std::size_t r_d, double zero_floor) {
    if (ed_counts.size() != nu.size()) throw Error("chisq_continuous: length mismatch");
    const std::size_t l = ed_counts.size();
    if (r_d < 1 || r_d + 1 > l) throw Error("chisq_continuous: cut-off outside [1, l-1]");
    ContinuousChiSquare out;
    double observed = 0.0;
    double expected = 0.0;
    for (std::size_t j = 0; j < r_d; ++j) {
        const double v = static_cast<double>(ed_counts[j]);
        const double e = nu[j] > 0.0 ? nu[j] : zero_floor;
        const double diff = v - (nu[j] > 0.0 ? nu[j] : 0.0);
        out.window += diff * diff / e;
        observed += v;
        expected += nu[j];
    }
    double tail = 0.0;
    for (std::size_t j = r_d; j < l; ++j) tail += nu[j];
    if (tail <= 0.0) {
        out.tail_empty = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    const double diff = observed - expected;
    out.value = out.window + diff * diff / tail;
    return out;
}

double chisq_weighted(double chi_c, double chi_d, std::size_t p, std::size_t q) {
    double w = 0.0;
    if (p > 0) w += chi_c / static_cast<double>(p);
    if (q > 0) w += chi_d / static_cast<double>(q);
    return w;
}

TestResult test_position(std::span<const std::size_t> hd_counts, std::span<const double> eps,
                         std::span<const std::size_t> ed_counts, std::span<const double> nu,
                         std::size_t p, std::size_t q, const StatOptions& options) {
    TestResult r;
    if (p > 0) {
        r.r_c = cutoff_categorical(hd_counts, eps);
        r.chi_c = chisq_categorical(hd_counts, eps, r.r_c);
    }
    double window_d = 0.0;
    if (q > 0) {
        r.r_d = cutoff_continuous(ed_counts, nu, options.continuous_minus_one);
        const auto cont = chisq_continuous(ed_counts, nu, r.r_d, options.zero_floor);
        r.chi_d = cont.value;
        r.tail_empty = cont.tail_empty;
        window_d = cont.tail_empty ? cont.window : cont.value;
    }
    r.chi_w = chisq_weighted(r.chi_c, r.chi_d, p, q);
    r.chi_w_window = chisq_weighted(r.chi_c, window_d, p, q);
    return r;
}

std::vector<TestResult> scan_positions(const MixedDataset& ds, const NullModel& null, const StatOptions& options) {
    const std::size_t n = ds.size();
    const std::size_t p = ds.p();
    const std::size_t q = ds.q();
    if (q > 0 && options.bins < 2) throw Error("scan: at least 2 bins are needed");
    std::vector<TestResult> results(n);
    const auto& eps = null.eps();
    const auto n_signed = static_cast<long long>(n);

#pragma omp parallel
    {
        std::vector<double> data_dist;
        std::vector<double> null_dist;
#pragma omp for schedule(static)
        for (long long ii = 0; ii < n_signed; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            const auto hd = hd_vector(ds, ds.categorical(i));
            std::vector<std::size_t> ed;
            std::vector<double> nu;
            if (q > 0) {
                const auto ref = ds.continuous(i);
                data_dist.resize(n);
                double d_max = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    data_dist[k] = euclidean(ds.continuous(k), ref);
                    d_max = std::max(d_max, data_dist[k]);
                }
                const auto bins = make_bins(d_max, options.bins);
                ed = bin_counts(data_dist, bins);
                null_distances(null.sample(), ref, null_dist);
                nu = ued_from_distances(null_dist, bins, n);
            }
            results[i] = test_position(hd, eps, ed, nu, p, q, options);
        }
    }
    return results;
}

double selection_score(const TestResult& result, std::optional<double> threshold) {
    if (!result.tail_empty) return result.chi_w;
    if (!threshold) return result.chi_w_window;
    return result.chi_w_window >= *threshold ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity();
}

std::size_t calibration_rank(double alpha, std::size_t replicates) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("calibration: alpha must lie in (0, 1)");
    if (replicates < 19) throw Error("calibration: at least 19 replicates are required");
    const double rank = static_cast<double>(replicates + 1) * (1.0 - alpha);
    const double rounded = std::round(rank);
    if (std::abs(rank - rounded) > 1e-9 * std::max(1.0, rank))
        throw Error("calibration: (B + 1)(1 - alpha) = " + std::to_string(rank) + " is not an integer");
    const auto k = static_cast<std::size_t>(rounded);
    if (k < 1 || k > replicates) throw Error("calibration: order-statistic rank out of range");
    return k;
}

Threshold calibrate_threshold(const MixedDataset& reference, std::size_t n, const StatOptions& stat,
                              const NullOptions& null, const CalibrationOptions& calib) {
    const std::size_t rank = calibration_rank(calib.alpha, calib.replicates);
    if (n < 1) throw Error("calibration: n must be at least 1");
    if (reference.size() == 0) throw Error("calibration: empty reference dataset");
    const auto box = ContinuousBox::of(reference);
    std::vector<double> maxima(calib.replicates, 0.0);
    const auto b_signed = static_cast<long long>(calib.replicates);

#pragma omp parallel for schedule(dynamic, 1)
    for (long long bb = 0; bb < b_signed; ++bb) {
        const auto b = static_cast<std::uint64_t>(bb);
        const auto replicate = sample_uniform(reference.schema(), n, box, derive_seed(calib.seed, b, 1));
        NullOptions options = null;
        options.seed = derive_seed(calib.seed, b, 2);
        const NullModel model(reference, n, options);
        const auto results = scan_positions(replicate, model, stat);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& r : results) best = std::max(best, selection_score(r, std::nullopt));
        maxima[bb] = best;
    }

    std::sort(maxima.begin(), maxima.end());
    Threshold t;
    t.alpha = calib.alpha;
    t.replicates = calib.replicates;
    t.seed = calib.seed;
    t.value = maxima[rank - 1];
    t.null_maxima = std::move(maxima);
    return t;
}

}  // namespace mixedclust
