#include "mixedclust/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mixedclust {

std::string to_string(Membership rule) {
    return rule == Membership::And ? "and" : "or";
}

Membership parse_membership(std::string_view text) {
    if (text == "and") return Membership::And;
    if (text == "or") return Membership::Or;
    throw Error("unknown membership rule '" + std::string(text) + "' (expected and or or)");
}

std::vector<int> ClusterResult::labels(std::size_t n) const {
    std::vector<int> out(n, 0);
    for (std::size_t k = 0; k < clusters.size(); ++k)
        for (auto row : clusters[k].members) out.at(row) = static_cast<int>(k + 1);
    return out;
}

CenterChoice best_center(std::span<const TestResult> scan, std::optional<double> threshold) {
    if (scan.empty()) throw Error("best_center: no candidate positions");
    CenterChoice best;
    best.score = -std::numeric_limits<double>::infinity();
    bool found = false;
    // Strict comparison keeps the first (smallest) row among equal scores.
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const double s = selection_score(scan[i], threshold);
        if (!found || s > best.score) {
            best = {i, scan[i], s};
            found = true;
        }
    }
    return best;
}

CenterChoice best_center(const MixedDataset& ds, const NullModel& null, const StatOptions& options,
                         std::optional<double> threshold) {
    const auto scan = scan_positions(ds, null, options);
    return best_center(scan, threshold);
}

std::size_t radius_categorical(std::span<const std::size_t> hd_counts, std::size_t fallback) {
    const std::size_t p = hd_counts.empty() ? 0 : hd_counts.size() - 1;
    for (std::size_t j = 1; j + 1 <= p; ++j) {
        if (hd_counts[j] < std::min(hd_counts[j - 1], hd_counts[j + 1])) return j - 1;
    }
    return fallback;
}

double radius_continuous(std::span<const double> sorted_distances, const Bins& bins, std::size_t r_d,
                         double jump_factor) {
    if (r_d >= bins.edges.size()) throw Error("radius_continuous: cut-off beyond the last bin");
    const double limit = bins.edges[r_d];
    const auto end = std::upper_bound(sorted_distances.begin(), sorted_distances.end(), limit);
    const std::span<const double> considered(sorted_distances.begin(), end);
    if (considered.size() < 2) return 0.0;
    if (jump_factor <= 0.0) return considered.back();

    std::vector<double> positive;
    for (std::size_t k = 1; k < considered.size(); ++k) {
        const double gap = considered[k] - considered[k - 1];
        if (gap > 0.0) positive.push_back(gap);
    }
    if (positive.empty()) return considered.back();
    std::sort(positive.begin(), positive.end());
    const std::size_t mid = positive.size() / 2;
    const double median = positive.size() % 2 == 1 ? positive[mid] : 0.5 * (positive[mid - 1] + positive[mid]);

    const double jump = jump_factor * median;
    for (std::size_t k = 1; k < considered.size(); ++k)
        if (considered[k] - considered[k - 1] > jump) return considered[k - 1];
    return considered.back();
}

std::vector<std::size_t> extract(const MixedDataset& ds, std::span<const LevelCode> center_cat,
                                 std::span<const double> center_cont, std::size_t radius_cat,
                                 double radius_cont, Membership rule) {
    std::vector<std::size_t> members;
    const bool has_cat = ds.p() > 0;
    const bool has_cont = ds.q() > 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const bool in_cat = has_cat && hamming(ds.categorical(i), center_cat) <= radius_cat;
        const bool in_cont = has_cont && euclidean(ds.continuous(i), center_cont) <= radius_cont;
        bool in = false;
        if (rule == Membership::And)
            in = (!has_cat || in_cat) && (!has_cont || in_cont);
        else
            in = in_cat || in_cont;
        if (in) members.push_back(i);
    }
    return members;
}

ClusterResult run_clustering(const MixedDataset& ds, const ClusterConfig& config) {
    if (ds.size() == 0) throw Error("run_clustering: empty dataset");
    if (ds.q() > 0 && config.stat.bins < 2) throw Error("run_clustering: at least 2 bins are needed");
    if (config.min_cluster_size < 1) throw Error("run_clustering: min_cluster_size must be at least 1");
    if (!config.fixed_threshold) calibration_rank(config.calib.alpha, config.calib.replicates);

    ClusterResult result;
    std::vector<std::size_t> remaining(ds.size());
    std::iota(remaining.begin(), remaining.end(), 0);

    for (std::size_t iteration = 0; !remaining.empty() && remaining.size() >= config.min_cluster_size;
         ++iteration) {
        const auto current = ds.subset(remaining);
        const std::size_t n = current.size();

        NullOptions null_options = config.null;
        null_options.seed = derive_seed(config.null.seed, iteration);
        // The null region stays that of the full data set; only n shrinks.
        const NullModel null(ds, n, null_options);
        const auto scan = scan_positions(current, null, config.stat);

        double threshold = 0.0;
        if (config.fixed_threshold) {
            threshold = *config.fixed_threshold;
        } else {
            CalibrationOptions calib = config.calib;
            calib.seed = derive_seed(config.calib.seed, iteration);
            threshold = calibrate_threshold(ds, n, config.stat, config.null, calib).value;
        }

        const auto choice = best_center(scan, threshold);
        IterationRecord record;
        record.iteration = iteration;
        record.remaining = n;
        record.center_row = remaining[choice.row];
        record.stat = choice.stat;
        record.max_score = choice.score;
        record.threshold = threshold;
        record.significant = choice.score >= threshold;

        const auto center_cat = current.categorical(choice.row);
        const auto center_cont = current.continuous(choice.row);
        record.hd_counts = hd_vector(current, center_cat);
        record.eps = null.eps();
        Bins bins;
        if (current.q() > 0) {
            auto d = ed_distances(current, center_cont);
            bins = make_bins(*std::max_element(d.begin(), d.end()), config.stat.bins);
            record.ed_counts = bin_counts(d, bins);
            record.nu = null.profile(center_cont, bins).nu;
            record.bin_edges = bins.edges;
            std::sort(d.begin(), d.end());
            record.sorted_distances = std::move(d);
        }

        if (!record.significant) {
            result.iterations.push_back(std::move(record));
            break;
        }

        record.radius_cat = current.p() > 0 ? radius_categorical(record.hd_counts, choice.stat.r_c) : 0;
        record.radius_cont = current.q() > 0 ? radius_continuous(record.sorted_distances, bins, choice.stat.r_d,
                                                                 config.jump_factor)
                                             : 0.0;
        const auto local = extract(current, center_cat, center_cont, record.radius_cat, record.radius_cont,
                                   config.membership);
        if (local.empty()) throw Error("run_clustering: extraction removed no rows");
        record.extracted = local.size();

        std::vector<std::size_t> members;
        members.reserve(local.size());
        for (auto k : local) members.push_back(remaining[k]);
        std::sort(members.begin(), members.end());

        if (members.size() < config.min_cluster_size) {
            record.undersized = true;
            result.unassigned.insert(result.unassigned.end(), members.begin(), members.end());
        } else {
            Cluster cluster;
            cluster.center_row = record.center_row;
            cluster.center_cat.assign(center_cat.begin(), center_cat.end());
            cluster.center_cont.assign(center_cont.begin(), center_cont.end());
            cluster.radius_cat = record.radius_cat;
            cluster.radius_cont = record.radius_cont;
            cluster.members = members;
            cluster.stat = choice.stat;
            result.clusters.push_back(std::move(cluster));
        }
        result.iterations.push_back(std::move(record));

        std::vector<std::size_t> next;
        next.reserve(remaining.size() - local.size());
        std::size_t cursor = 0;
        for (std::size_t k = 0; k < remaining.size(); ++k) {
            if (cursor < local.size() && local[cursor] == k) {
                ++cursor;
                continue;
            }
            next.push_back(remaining[k]);
        }
        remaining = std::move(next);
    }

    result.unassigned.insert(result.unassigned.end(), remaining.begin(), remaining.end());
    std::sort(result.unassigned.begin(), result.unassigned.end());
    return result;
}

}  // namespace mixedclust
