#pragma once

#include "mixedclust/bench.hpp"
#include "mixedclust/cluster.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace mixedclust::cli {

/// Exit codes: 0 success, 1 usage or validation failure, 2 internal invariant breach.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Flat key/value view of every effective clustering setting.
nlohmann::ordered_json config_to_json(const ClusterConfig& config);
ClusterConfig config_from_json(const nlohmann::json& doc, ClusterConfig base = {});

std::string labels_csv(const std::vector<int>& labels, const char* column = "cluster_label");
/// Parses (row_id, label) files; rows must be 0..n-1 in order.
std::vector<int> parse_labels_csv(const std::string& text);

/// Writes iterations.csv plus per-iteration curve files into `dir`.
void write_diagnostics(const std::string& dir, const ClusterResult& result);

/// Seed used when --seed is absent: MIXEDCLUST_SEED if set, else 0.
std::uint64_t default_seed();

}  // namespace mixedclust::cli
