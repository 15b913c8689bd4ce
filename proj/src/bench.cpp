#include "mixedclust/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace mixedclust {

namespace {

double entropy_bits(const std::map<int, std::size_t>& counts, double total) {
    double h = 0.0;
    for (const auto& [label, c] : counts) {
        if (c == 0) continue;
        const double f = static_cast<double>(c) / total;
        h -= f * std::log2(f);
    }
    return h;
}

std::uint64_t name_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void mean_sd(const std::vector<double>& xs, double& mean, double& sd) {
    mean = xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

}  // namespace

LabeledDataset gen_mixed(const SynthConfig& config) {
    const std::size_t p = config.p;
    const std::size_t q = config.q;
    const std::size_t n = std::accumulate(config.sizes.begin(), config.sizes.end(), std::size_t{0});
    if (config.sizes.empty() || n == 0) throw Error("synth: cluster sizes sum to zero");
    if (p + q == 0) throw Error("synth: need at least one attribute");
    if (p > 0 && config.level_pool.empty()) throw Error("synth: empty level pool");
    if (!(config.sigma2 >= 0.0)) throw Error("synth: sigma2 must be nonnegative");
    if (!(config.center_prob <= 1.0)) throw Error("synth: center probability above 1");

    std::mt19937_64 rng(config.seed);
    std::vector<CategoricalAttribute> cats(p);
    std::vector<std::size_t> m(p);
    for (std::size_t j = 0; j < p; ++j) {
        m[j] = config.level_pool[std::uniform_int_distribution<std::size_t>(0, config.level_pool.size() - 1)(rng)];
        if (m[j] < 2) throw Error("synth: level counts must be at least 2");
        if (!(config.center_prob > 1.0 / static_cast<double>(m[j])))
            throw Error("synth: center probability must exceed 1/m_j");
        cats[j].name = "c" + std::to_string(j + 1);
        for (std::size_t a = 0; a < m[j]; ++a) cats[j].levels.push_back("L" + std::to_string(a + 1));
    }
    std::vector<std::string> conts(q);
    for (std::size_t j = 0; j < q; ++j) conts[j] = "z" + std::to_string(j + 1);
    Schema schema(std::move(cats), std::move(conts));

    const std::size_t K = config.sizes.size();
    const std::size_t min_sep = (p + 1) / 2;
    std::vector<std::vector<LevelCode>> centers;
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<LevelCode> c(p);
        bool placed = false;
        for (int attempt = 0; attempt < 100000 && !placed; ++attempt) {
            for (std::size_t j = 0; j < p; ++j)
                c[j] = static_cast<LevelCode>(std::uniform_int_distribution<std::size_t>(0, m[j] - 1)(rng));
            placed = std::all_of(centers.begin(), centers.end(),
                                 [&](const auto& other) { return hamming(c, other) >= min_sep; });
        }
        if (!placed) throw Error("synth: cannot place categorical centers at the required separation");
        centers.push_back(c);
    }

    std::vector<LevelCode> codes;
    std::vector<double> values;
    std::vector<int> truth;
    codes.reserve(n * p);
    values.reserve(n * q);
    truth.reserve(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, std::sqrt(config.sigma2));
    for (std::size_t k = 0; k < K; ++k) {
        const double mu = config.center_gap * static_cast<double>(k + 1);
        for (std::size_t r = 0; r < config.sizes[k]; ++r) {
            for (std::size_t j = 0; j < p; ++j) {
                if (unit(rng) < config.center_prob) {
                    codes.push_back(centers[k][j]);
                } else {
                    // uniform over the m_j - 1 non-center levels
                    auto other = std::uniform_int_distribution<std::size_t>(0, m[j] - 2)(rng);
                    if (other >= centers[k][j]) ++other;
                    codes.push_back(static_cast<LevelCode>(other));
                }
            }
            for (std::size_t j = 0; j < q; ++j) values.push_back(config.sigma2 > 0.0 ? mu + noise(rng) : mu);
            truth.push_back(static_cast<int>(k + 1));
        }
    }
    return {MixedDataset(std::move(schema), n, std::move(codes), std::move(values)), std::move(truth)};
}

std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
    const std::size_t n = weight.size();
    if (n == 0) return {};
    for (const auto& row : weight)
        if (row.size() != n) throw Error("assignment: matrix must be square");
    // Shortest augmenting path form of the Hungarian method on cost = -weight,
    // with 1-based potentials u (rows) and v (columns).
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
    return assignment;
}

double classification_rate(std::span<const int> truth, std::span<const int> pred) {
    if (truth.size() != pred.size()) throw Error("classification_rate: length mismatch");
    if (truth.empty()) throw Error("classification_rate: empty labels");
    std::map<int, std::size_t> truth_index;
    std::map<int, std::size_t> pred_index;
    for (int t : truth) truth_index.emplace(t, truth_index.size());
    for (int c : pred)
        if (c != 0) pred_index.emplace(c, pred_index.size());
    const std::size_t dim = std::max(truth_index.size(), pred_index.size());
    if (pred_index.empty()) return 0.0;
    std::vector<std::vector<double>> agree(dim, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (pred[i] == 0) continue;
        agree[pred_index[pred[i]]][truth_index[truth[i]]] += 1.0;
    }
    const auto assignment = max_weight_assignment(agree);
    double matched = 0.0;
    for (std::size_t r = 0; r < dim; ++r) matched += agree[r][assignment[r]];
    return matched / static_cast<double>(truth.size());
}

double information_gain(std::span<const int> truth, std::span<const int> pred) {
    if (truth.size() != pred.size()) throw Error("information_gain: length mismatch");
    std::map<int, std::size_t> t_counts;
    for (int t : truth) ++t_counts[t];
    if (t_counts.size() < 2) throw Error("information_gain: truth must contain at least two classes");
    const double n = static_cast<double>(truth.size());
    const double h_truth = entropy_bits(t_counts, n);

    std::map<int, std::map<int, std::size_t>> joint;
    for (std::size_t i = 0; i < truth.size(); ++i) ++joint[pred[i]][truth[i]];
    double h_cond = 0.0;
    for (const auto& [label, counts] : joint) {
        double group = 0.0;
        for (const auto& [t, c] : counts) group += static_cast<double>(c);
        h_cond += group / n * entropy_bits(counts, group);
    }
    return std::clamp((h_truth - h_cond) / h_truth, 0.0, 1.0);
}

std::vector<BenchSetting> table_settings() {
    std::vector<BenchSetting> out;
    for (int table = 1; table <= 4; ++table)
        for (double s2 : {0.25, 0.5, 1.0}) out.push_back(table_setting(table, s2));
    return out;
}

BenchSetting table_setting(int table, double sigma2) {
    static const std::vector<std::vector<std::size_t>> layouts{
        {100, 75, 25}, {130, 45, 25}, {40, 25, 15, 10, 10}, {35, 25, 20, 10, 10}};
    if (table < 1 || table > 4) throw Error("bench: table must be 1..4");
    std::ostringstream name;
    name << "table" << table << "_var" << sigma2;
    return {name.str(), layouts[table - 1], sigma2};
}

MixedDataset categorical_part(const MixedDataset& ds) {
    Schema schema(ds.schema().categorical(), {});
    return MixedDataset(schema, ds.size(), ds.codes(), {});
}

MixedDataset continuous_part(const MixedDataset& ds) {
    Schema schema({}, ds.schema().continuous());
    return MixedDataset(schema, ds.size(), {}, ds.values());
}

BenchRecord run_replicate(const BenchSetting& setting, std::size_t replicate, const BenchOptions& options,
                          const ClusterConfig& cluster) {
    const std::uint64_t stream = name_hash(setting.name);
    SynthConfig synth = options.synth;
    synth.sizes = setting.sizes;
    synth.sigma2 = setting.sigma2;
    synth.seed = derive_seed(options.seed, stream, 2 * replicate);
    const auto data = gen_mixed(synth);

    ClusterConfig config = cluster;
    config.null.seed = derive_seed(options.seed, stream, 2 * replicate + 1);
    config.calib.seed = derive_seed(config.null.seed, 0x5eed);

    BenchRecord rec;
    rec.replicate = replicate;
    rec.setting = setting.name;
    const auto start = std::chrono::steady_clock::now();
    const auto result = run_clustering(data.data, config);
    rec.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const auto labels = result.labels(data.data.size());
    rec.cr = classification_rate(data.truth, labels);
    rec.ig = information_gain(data.truth, labels);
    rec.clusters_found = result.clusters.size();

    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.cr_cat = rec.ig_cat = rec.cr_cont = rec.ig_cont = nan;
    if (options.per_portion && data.data.p() > 0 && data.data.q() > 0) {
        const auto cat = run_clustering(categorical_part(data.data), config).labels(data.data.size());
        rec.cr_cat = classification_rate(data.truth, cat);
        rec.ig_cat = information_gain(data.truth, cat);
        const auto cont = run_clustering(continuous_part(data.data), config).labels(data.data.size());
        rec.cr_cont = classification_rate(data.truth, cont);
        rec.ig_cont = information_gain(data.truth, cont);
    }
    return rec;
}

std::vector<BenchRecord> run_bench(std::span<const BenchSetting> settings, const BenchOptions& options,
                                   const ClusterConfig& cluster) {
    std::vector<BenchRecord> out;
    for (const auto& setting : settings)
        for (std::size_t r = 0; r < options.replicates; ++r) out.push_back(run_replicate(setting, r, options, cluster));
    return out;
}

std::string bench_report_csv(std::span<const BenchRecord> records, bool per_portion) {
    std::ostringstream out;
    out.precision(6);
    out << std::fixed;
    out << "replicate,setting,CR,IG,clusters_found,runtime_ms";
    if (per_portion) out << ",CR_cat,IG_cat,CR_cont,IG_cont";
    out << '\n';
    std::vector<std::string> order;
    std::map<std::string, std::vector<const BenchRecord*>> by_setting;
    for (const auto& r : records) {
        if (!by_setting.count(r.setting)) order.push_back(r.setting);
        by_setting[r.setting].push_back(&r);
        out << r.replicate << ',' << r.setting << ',' << r.cr << ',' << r.ig << ',' << r.clusters_found << ','
            << r.runtime_ms;
        if (per_portion) out << ',' << r.cr_cat << ',' << r.ig_cat << ',' << r.cr_cont << ',' << r.ig_cont;
        out << '\n';
    }
    for (const auto& name : order) {
        const auto& rows = by_setting[name];
        auto column = [&](auto field) {
            std::vector<double> xs;
            for (const auto* r : rows) xs.push_back(field(*r));
            return xs;
        };
        std::vector<std::vector<double>> cols{
            column([](const BenchRecord& r) { return r.cr; }),
            column([](const BenchRecord& r) { return r.ig; }),
            column([](const BenchRecord& r) { return static_cast<double>(r.clusters_found); }),
            column([](const BenchRecord& r) { return r.runtime_ms; })};
        if (per_portion) {
            cols.push_back(column([](const BenchRecord& r) { return r.cr_cat; }));
            cols.push_back(column([](const BenchRecord& r) { return r.ig_cat; }));
            cols.push_back(column([](const BenchRecord& r) { return r.cr_cont; }));
            cols.push_back(column([](const BenchRecord& r) { return r.ig_cont; }));
        }
        std::vector<double> means, sds;
        for (const auto& c : cols) {
            double m = 0.0, s = 0.0;
            mean_sd(c, m, s);
            means.push_back(m);
            sds.push_back(s);
        }
        auto emit = [&](const char* tag, const std::vector<double>& vals) {
            out << tag << ',' << name;
            for (double v : vals) out << ',' << v;
            out << '\n';
        };
        emit("mean", means);
        emit("sd", sds);
    }
    return out.str();
}

}  // namespace mixedclust
