#include "commands.hpp"

#include "mixedclust/dataset.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mixedclust::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size()) throw Error("bad integer list '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw Error("empty integer list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size()) throw Error("bad number list '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw Error("empty number list");
    return out;
}

void set_threads(std::optional<int> threads) {
#ifdef _OPENMP
    if (threads) omp_set_num_threads(std::max(1, *threads));
#else
    (void)threads;
#endif
}

/// Clustering flags shared by `cluster` and `bench`. Every flag is optional
/// so that values from --config only get overridden when given explicitly.
struct ClusterFlags {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> bins;
    std::optional<double> alpha;
    std::optional<std::size_t> calib_b;
    std::optional<std::uint64_t> calib_seed;
    std::optional<std::string> null_mode;
    std::optional<std::size_t> null_size;
    std::optional<std::uint64_t> null_seed;
    std::optional<double> threshold;
    std::optional<double> jump_factor;
    std::optional<std::string> membership;
    std::optional<std::size_t> min_cluster_size;
    bool minus_one = false;
    std::optional<int> threads;

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "Run manifest or config JSON to start from");
        app.add_option("--seed", seed, "Base seed (default: MIXEDCLUST_SEED or 0)");
        app.add_option("--bins", bins, "ED vector bin count l (default 10)");
        app.add_option("--alpha", alpha, "Significance level (default 0.05)");
        app.add_option("--calib-b", calib_b, "Calibration replicates B (default 199)");
        app.add_option("--calib-seed", calib_seed, "Calibration seed (default derived from --seed)");
        app.add_option("--null-mode", null_mode, "uniform-box or permute");
        app.add_option("--null-size", null_size, "Null sample size (default max(n, 5000))");
        app.add_option("--null-seed", null_seed, "Null sample seed (default derived from --seed)");
        app.add_option("--threshold", threshold, "Fixed critical value; disables calibration");
        app.add_option("--jump-factor", jump_factor, "Continuous radius jump factor; 0 disables the jump search (default 0)");
        app.add_option("--membership", membership, "Membership rule: or (default) | and");
        app.add_option("--min-cluster-size", min_cluster_size, "Smallest extraction kept as a cluster (default 2)");
        app.add_flag("--cutoff-minus-one", minus_one, "Subtract one from the continuous cut-off too");
        app.add_option("--threads", threads, "Worker threads for the position scans");
    }

    /// Returns the effective config and the base seed it was derived from.
    ClusterConfig resolve(std::uint64_t& base_seed) const {
        ClusterConfig config;
        nlohmann::json doc;
        if (config_path) {
            try {
                doc = nlohmann::json::parse(read_file(*config_path));
            } catch (const nlohmann::json::exception& e) {
                throw Error("config '" + *config_path + "': " + e.what());
            }
            if (doc.contains("config")) doc = doc["config"];
            config = config_from_json(doc);
        }
        base_seed = seed ? *seed : (doc.contains("seed") ? doc["seed"].get<std::uint64_t>() : default_seed());
        if (!doc.contains("null.seed") || seed) config.null.seed = derive_seed(base_seed, 1);
        if (!doc.contains("calib.seed") || seed) config.calib.seed = derive_seed(base_seed, 2);
        if (bins) config.stat.bins = *bins;
        if (alpha) config.calib.alpha = *alpha;
        if (calib_b) config.calib.replicates = *calib_b;
        if (calib_seed) config.calib.seed = *calib_seed;
        if (null_mode) config.null.mode = parse_null_mode(*null_mode);
        if (null_size) config.null.size = *null_size;
        if (null_seed) config.null.seed = *null_seed;
        if (threshold) config.fixed_threshold = *threshold;
        if (jump_factor) config.jump_factor = *jump_factor;
        if (membership) config.membership = parse_membership(*membership);
        if (min_cluster_size) config.min_cluster_size = *min_cluster_size;
        if (minus_one) config.stat.continuous_minus_one = true;

        if (config.stat.bins < 2) throw Error("--bins must be at least 2");
        if (!(config.jump_factor >= 0.0)) throw Error("--jump-factor must be non-negative");
        if (config.min_cluster_size < 1) throw Error("--min-cluster-size must be at least 1");
        if (!config.fixed_threshold) calibration_rank(config.calib.alpha, config.calib.replicates);
        return config;
    }
};

int cmd_cluster(const std::string& input, const std::string& schema_path, const std::string& out_path,
                const std::optional<std::string>& diagnostics, const std::optional<std::string>& manifest_path,
                const ClusterFlags& flags, std::ostream& out) {
    std::uint64_t base_seed = 0;
    const auto config = flags.resolve(base_seed);
    set_threads(flags.threads);

    const auto schema = parse_schema(read_file(schema_path));
    const auto ds = load_dataset(read_file(input), schema);
    const auto report = validate(ds);
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';

    const auto result = run_clustering(ds, config);
    for (const auto& it : result.iterations) {
        out << "iteration " << it.iteration << ": n=" << it.remaining << " center=" << it.center_row
            << " chi_w=" << num(it.max_score) << " threshold=" << num(it.threshold);
        if (it.significant) out << " extracted=" << it.extracted << (it.undersized ? " (undersized)" : "");
        else out << " stop";
        out << '\n';
    }
    out << result.clusters.size() << " clusters, " << result.unassigned.size() << " unassigned\n";

    // Internal consistency: the labels must partition every row exactly once.
    std::vector<int> seen(ds.size(), 0);
    for (const auto& c : result.clusters)
        for (auto r : c.members) ++seen.at(r);
    for (auto r : result.unassigned) ++seen.at(r);
    for (int s : seen)
        if (s != 1) throw std::logic_error("cluster result does not partition the rows");

    write_text(out_path, labels_csv(result.labels(ds.size())));
    if (diagnostics) write_diagnostics(*diagnostics, result);

    nlohmann::ordered_json manifest;
    manifest["command"] = "cluster";
    manifest["input"] = input;
    manifest["schema"] = schema_path;
    manifest["out"] = out_path;
    manifest["diagnostics"] = diagnostics ? nlohmann::ordered_json(*diagnostics) : nlohmann::ordered_json();
    manifest["seed"] = base_seed;
    manifest["config"] = config_to_json(config);
    manifest["clusters_found"] = result.clusters.size();
    write_text(manifest_path ? *manifest_path : out_path + ".manifest.json", manifest.dump(2) + "\n");
    return 0;
}

int cmd_synth(SynthConfig synth, const std::string& prefix, std::ostream& out) {
    const auto data = gen_mixed(synth);
    write_text(prefix + ".csv", serialize_dataset(data.data));
    write_text(prefix + ".schema.json", serialize_schema(data.data.schema()));
    std::ostringstream truth;
    truth << "row_id,true_label\n";
    for (std::size_t i = 0; i < data.truth.size(); ++i) truth << i << ',' << data.truth[i] << '\n';
    write_text(prefix + ".truth.csv", truth.str());
    out << "wrote " << data.data.size() << " rows to " << prefix << ".csv\n";
    return 0;
}

int cmd_eval(const std::string& labels_path, const std::string& truth_path,
             const std::optional<std::string>& out_path, std::ostream& out) {
    const auto pred = parse_labels_csv(read_file(labels_path));
    const auto truth = parse_labels_csv(read_file(truth_path));
    if (pred.size() != truth.size())
        throw Error("row_id mismatch: " + std::to_string(pred.size()) + " labels vs " +
                    std::to_string(truth.size()) + " truth rows");
    const double cr = classification_rate(truth, pred);
    const double ig = information_gain(truth, pred);
    out << "CR=" << num(cr) << " IG=" << num(ig) << '\n';
    if (out_path) {
        nlohmann::ordered_json doc;
        doc["CR"] = cr;
        doc["IG"] = ig;
        doc["n"] = truth.size();
        write_text(*out_path, doc.dump(2) + "\n");
    }
    return 0;
}

}  // namespace

std::uint64_t default_seed() {
    if (const char* env = std::getenv("MIXEDCLUST_SEED")) {
        std::uint64_t v = 0;
        const std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size()) return v;
        throw Error("MIXEDCLUST_SEED is not an unsigned integer");
    }
    return 0;
}

nlohmann::ordered_json config_to_json(const ClusterConfig& config) {
    nlohmann::ordered_json doc;
    doc["bins"] = config.stat.bins;
    doc["alpha"] = config.calib.alpha;
    doc["calib.B"] = config.calib.replicates;
    doc["calib.seed"] = config.calib.seed;
    doc["null.mode"] = to_string(config.null.mode);
    doc["null.size"] = config.null.size ? nlohmann::ordered_json(*config.null.size) : nlohmann::ordered_json();
    doc["null.seed"] = config.null.seed;
    doc["threshold.fixed"] =
        config.fixed_threshold ? nlohmann::ordered_json(*config.fixed_threshold) : nlohmann::ordered_json();
    doc["cutoff.continuous_minus_one"] = config.stat.continuous_minus_one;
    doc["cutoff.zero_floor"] = config.stat.zero_floor;
    doc["radius.jump_factor"] = config.jump_factor;
    doc["membership"] = to_string(config.membership);
    doc["min_cluster_size"] = config.min_cluster_size;
    return doc;
}

ClusterConfig config_from_json(const nlohmann::json& doc, ClusterConfig base) {
    try {
        if (doc.contains("bins")) base.stat.bins = doc["bins"].get<std::size_t>();
        if (doc.contains("alpha")) base.calib.alpha = doc["alpha"].get<double>();
        if (doc.contains("calib.B")) base.calib.replicates = doc["calib.B"].get<std::size_t>();
        if (doc.contains("calib.seed")) base.calib.seed = doc["calib.seed"].get<std::uint64_t>();
        if (doc.contains("null.mode")) base.null.mode = parse_null_mode(doc["null.mode"].get<std::string>());
        if (doc.contains("null.size") && !doc["null.size"].is_null())
            base.null.size = doc["null.size"].get<std::size_t>();
        if (doc.contains("null.seed")) base.null.seed = doc["null.seed"].get<std::uint64_t>();
        if (doc.contains("threshold.fixed") && !doc["threshold.fixed"].is_null())
            base.fixed_threshold = doc["threshold.fixed"].get<double>();
        if (doc.contains("cutoff.continuous_minus_one"))
            base.stat.continuous_minus_one = doc["cutoff.continuous_minus_one"].get<bool>();
        if (doc.contains("cutoff.zero_floor")) base.stat.zero_floor = doc["cutoff.zero_floor"].get<double>();
        if (doc.contains("radius.jump_factor")) base.jump_factor = doc["radius.jump_factor"].get<double>();
        if (doc.contains("membership")) base.membership = parse_membership(doc["membership"].get<std::string>());
        if (doc.contains("min_cluster_size")) base.min_cluster_size = doc["min_cluster_size"].get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    return base;
}

std::string labels_csv(const std::vector<int>& labels, const char* column) {
    std::ostringstream out;
    out << "row_id," << column << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
    return out.str();
}

std::vector<int> parse_labels_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("labels: missing header");
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error("labels: line " + std::to_string(line_no) + " has no comma");
        std::size_t row = 0;
        int label = 0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, row);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), label);
        if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != line.data() + comma ||
            r2.ptr != line.data() + line.size())
            throw Error("labels: line " + std::to_string(line_no) + " is malformed");
        if (row != labels.size())
            throw Error("labels: row_id mismatch at line " + std::to_string(line_no) + " (expected " +
                        std::to_string(labels.size()) + ", got " + std::to_string(row) + ")");
        labels.push_back(label);
    }
    return labels;
}

void write_diagnostics(const std::string& dir, const ClusterResult& result) {
    fs::create_directories(dir);
    std::ostringstream summary;
    summary << "iteration,remaining,center_row,r_c,r_d,R_c,R_d,chi_c,chi_d,chi_w,threshold,significant,extracted,"
               "undersized\n";
    for (const auto& it : result.iterations) {
        summary << it.iteration << ',' << it.remaining << ',' << it.center_row << ',' << it.stat.r_c << ','
                << it.stat.r_d << ',' << it.radius_cat << ',' << num(it.radius_cont) << ',' << num(it.stat.chi_c)
                << ',' << num(it.stat.chi_d) << ',' << num(it.stat.chi_w) << ',' << num(it.threshold) << ','
                << (it.significant ? 1 : 0) << ',' << it.extracted << ',' << (it.undersized ? 1 : 0) << '\n';

        const std::string stem = dir + "/iter" + std::to_string(it.iteration);
        std::ostringstream hd;
        hd << "j,U_j,eps_j\n";
        for (std::size_t j = 0; j < it.hd_counts.size(); ++j)
            hd << j << ',' << it.hd_counts[j] << ',' << num(it.eps[j]) << '\n';
        write_text(stem + "_hd.csv", hd.str());

        if (!it.ed_counts.empty()) {
            std::ostringstream ed;
            ed << "bin,lower,upper,V_j,nu_j\n";
            for (std::size_t j = 0; j < it.ed_counts.size(); ++j)
                ed << j + 1 << ',' << num(it.bin_edges[j]) << ',' << num(it.bin_edges[j + 1]) << ','
                   << it.ed_counts[j] << ',' << num(it.nu[j]) << '\n';
            write_text(stem + "_ed.csv", ed.str());

            std::ostringstream cdf;
            cdf << "rank,distance,cdf\n";
            const auto n = it.sorted_distances.size();
            for (std::size_t k = 0; k < n; ++k)
                cdf << k + 1 << ',' << num(it.sorted_distances[k]) << ','
                    << num(static_cast<double>(k + 1) / static_cast<double>(n)) << '\n';
            write_text(stem + "_cdf.csv", cdf.str());
        }
    }
    write_text(dir + "/iterations.csv", summary.str());
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonparametric clustering of mixed categorical and continuous data"};
    app.require_subcommand(1);

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Cluster a CSV data set");
    std::string input, schema_path, out_path;
    std::optional<std::string> diagnostics, manifest_path;
    ClusterFlags cluster_flags;
    cluster->add_option("--input", input, "Data CSV")->required();
    cluster->add_option("--schema", schema_path, "Schema JSON")->required();
    cluster->add_option("--out", out_path, "Labels CSV to write")->required();
    cluster->add_option("--diagnostics", diagnostics, "Directory for per-iteration curve CSVs");
    cluster->add_option("--manifest", manifest_path, "Manifest path (default <out>.manifest.json)");
    cluster_flags.attach(*cluster);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic data set");
    SynthConfig synth_config;
    std::string synth_prefix;
    std::optional<std::uint64_t> synth_seed;
    std::optional<int> synth_table;
    bool table1 = false, table2 = false, table3 = false, table4 = false;
    std::optional<std::size_t> synth_k;
    std::optional<std::string> synth_sizes, synth_levels;
    synth->add_option("--out", synth_prefix, "Output prefix: writes PREFIX.csv, .schema.json, .truth.csv")
        ->required();
    synth->add_option("--seed", synth_seed, "Generator seed (default: MIXEDCLUST_SEED or 0)");
    synth->add_option("--table", synth_table, "Preset cluster sizes of simulation table 1..4");
    synth->add_flag("--table1", table1, "Sizes 100,75,25");
    synth->add_flag("--table2", table2, "Sizes 130,45,25");
    synth->add_flag("--table3", table3, "Sizes 40,25,15,10,10");
    synth->add_flag("--table4", table4, "Sizes 35,25,20,10,10");
    synth->add_option("--k", synth_k, "Number of clusters (must match --sizes)");
    synth->add_option("--sizes", synth_sizes, "Comma-separated cluster sizes");
    synth->add_option("--p", synth_config.p, "Categorical attributes (default 10)");
    synth->add_option("--q", synth_config.q, "Continuous attributes (default 10)");
    synth->add_option("--levels", synth_levels, "Level-count pool (default 4,5,6)");
    synth->add_option("--center-prob", synth_config.center_prob, "Center-level probability (default 0.7)");
    synth->add_option("--sigma2", synth_config.sigma2, "Continuous variance (default 0.25)");
    synth->add_option("--center-gap", synth_config.center_gap, "Continuous center spacing (default 3)");

    // eval
    auto* eval = app.add_subcommand("eval", "Score labels against truth");
    std::string eval_labels, eval_truth;
    std::optional<std::string> eval_out;
    eval->add_option("--labels", eval_labels, "Labels CSV (row_id,cluster_label)")->required();
    eval->add_option("--truth", eval_truth, "Truth CSV (row_id,true_label)")->required();
    eval->add_option("--out", eval_out, "Metrics JSON to write");

    // bench
    auto* bench = app.add_subcommand("bench", "Run the simulation-table sweep");
    ClusterFlags bench_flags;
    std::string bench_out;
    std::size_t bench_reps = 50;
    std::string bench_tables = "1,2,3,4";
    std::string bench_vars = "0.25,0.5,1";
    bool per_portion = false;
    bench->add_option("--out", bench_out, "Report CSV")->required();
    bench->add_option("--replicates", bench_reps, "Replicates per setting (default 50)");
    bench->add_option("--tables", bench_tables, "Tables to run (default 1,2,3,4)");
    bench->add_option("--variances", bench_vars, "Variances to run (default 0.25,0.5,1)");
    bench->add_flag("--per-portion", per_portion, "Also score categorical-only and continuous-only runs");
    bench_flags.attach(*bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*cluster) return cmd_cluster(input, schema_path, out_path, diagnostics, manifest_path, cluster_flags, out);
        if (*synth) {
            int chosen = synth_table.value_or(0);
            for (auto [flag, t] : {std::pair{table1, 1}, {table2, 2}, {table3, 3}, {table4, 4}})
                if (flag) chosen = t;
            if (chosen != 0) synth_config.sizes = table_setting(chosen, synth_config.sigma2).sizes;
            if (synth_sizes) synth_config.sizes = parse_size_list(*synth_sizes);
            if (synth_k && *synth_k != synth_config.sizes.size())
                throw Error("--k " + std::to_string(*synth_k) + " does not match " +
                            std::to_string(synth_config.sizes.size()) + " sizes");
            if (synth_levels) synth_config.level_pool = parse_size_list(*synth_levels);
            synth_config.seed = synth_seed ? *synth_seed : default_seed();
            return cmd_synth(synth_config, synth_prefix, out);
        }
        if (*eval) return cmd_eval(eval_labels, eval_truth, eval_out, out);
        if (*bench) {
            std::uint64_t base_seed = 0;
            const auto config = bench_flags.resolve(base_seed);
            set_threads(bench_flags.threads);
            std::vector<BenchSetting> settings;
            for (auto t : parse_size_list(bench_tables))
                for (double v : parse_double_list(bench_vars)) settings.push_back(table_setting(static_cast<int>(t), v));
            BenchOptions options;
            options.replicates = bench_reps;
            options.seed = base_seed;
            options.per_portion = per_portion;
            std::vector<BenchRecord> records;
            for (const auto& s : settings) {
                for (std::size_t r = 0; r < bench_reps; ++r) {
                    records.push_back(run_replicate(s, r, options, config));
                    const auto& rec = records.back();
                    out << s.name << " #" << r << ": CR=" << num(rec.cr) << " IG=" << num(rec.ig)
                        << " clusters=" << rec.clusters_found << '\n';
                }
            }
            write_text(bench_out, bench_report_csv(records, per_portion));
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace mixedclust::cli
