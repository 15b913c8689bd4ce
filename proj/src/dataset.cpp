#include "mixedclust/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mixedclust {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Schema::Schema(std::vector<CategoricalAttribute> categorical, std::vector<std::string> continuous)
    : categorical_(std::move(categorical)), continuous_(std::move(continuous)) {
    if (categorical_.empty() && continuous_.empty())
        throw Error("schema: empty attribute list");
    std::set<std::string> names;
    auto claim = [&](const std::string& name) {
        if (name.empty()) throw Error("schema: empty attribute name");
        if (!names.insert(name).second) throw Error("schema: duplicate attribute name '" + name + "'");
    };
    for (const auto& attr : categorical_) {
        claim(attr.name);
        if (attr.levels.size() < 2)
            throw Error("schema: categorical attribute '" + attr.name + "' needs at least 2 levels");
        if (attr.levels.size() > 65535)
            throw Error("schema: categorical attribute '" + attr.name + "' has too many levels");
        std::set<std::string> seen(attr.levels.begin(), attr.levels.end());
        if (seen.size() != attr.levels.size())
            throw Error("schema: duplicate level in attribute '" + attr.name + "'");
    }
    for (const auto& name : continuous_) claim(name);
}

std::vector<std::size_t> Schema::level_counts() const {
    std::vector<std::size_t> m;
    m.reserve(categorical_.size());
    for (const auto& attr : categorical_) m.push_back(attr.levels.size());
    return m;
}

int Schema::level_code(std::size_t j, std::string_view level) const {
    const auto& levels = categorical_.at(j).levels;
    for (std::size_t k = 0; k < levels.size(); ++k)
        if (levels[k] == level) return static_cast<int>(k);
    return -1;
}

MixedDataset::MixedDataset(Schema schema, std::size_t n, std::vector<LevelCode> codes,
                           std::vector<double> values)
    : schema_(std::move(schema)), n_(n), codes_(std::move(codes)), values_(std::move(values)) {
    if (codes_.size() != n_ * schema_.p() || values_.size() != n_ * schema_.q())
        throw Error("dataset: buffer sizes do not match n and schema");
}

MixedDataset MixedDataset::subset(std::span<const std::size_t> rows) const {
    std::vector<LevelCode> codes;
    std::vector<double> values;
    codes.reserve(rows.size() * p());
    values.reserve(rows.size() * q());
    for (auto i : rows) {
        if (i >= n_) throw Error("dataset: subset row out of range");
        auto c = categorical(i);
        auto z = continuous(i);
        codes.insert(codes.end(), c.begin(), c.end());
        values.insert(values.end(), z.begin(), z.end());
    }
    return MixedDataset(schema_, rows.size(), std::move(codes), std::move(values));
}

Schema parse_schema(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("schema: malformed document: ") + e.what());
    }
    if (!doc.is_object()) throw Error("schema: document must be an object");
    std::vector<CategoricalAttribute> categorical;
    std::vector<std::string> continuous;
    try {
        if (doc.contains("categorical")) {
            for (const auto& item : doc.at("categorical")) {
                CategoricalAttribute attr;
                attr.name = item.at("name").get<std::string>();
                for (const auto& level : item.at("levels")) {
                    // Numeric levels are accepted and compared by their text form.
                    attr.levels.push_back(level.is_string() ? level.get<std::string>() : level.dump());
                }
                categorical.push_back(std::move(attr));
            }
        }
        if (doc.contains("continuous")) {
            for (const auto& item : doc.at("continuous")) continuous.push_back(item.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("schema: malformed document: ") + e.what());
    }
    return Schema(std::move(categorical), std::move(continuous));
}

std::string serialize_schema(const Schema& schema) {
    nlohmann::ordered_json doc;
    doc["categorical"] = nlohmann::ordered_json::array();
    for (const auto& attr : schema.categorical())
        doc["categorical"].push_back({{"name", attr.name}, {"levels", attr.levels}});
    doc["continuous"] = schema.continuous();
    return doc.dump(2) + "\n";
}

MixedDataset load_dataset(std::string_view table, const Schema& schema) {
    const auto lines = lines_of(table);
    if (lines.empty()) throw Error("data: missing header row");

    const std::size_t p = schema.p();
    const std::size_t q = schema.q();
    const auto header = split(lines.front(), ',');
    if (header.size() != p + q)
        throw Error("data: header has " + std::to_string(header.size()) + " columns, schema declares " +
                    std::to_string(p + q));

    // column index in file -> (is_categorical, attribute index)
    std::unordered_map<std::string, std::pair<bool, std::size_t>> by_name;
    for (std::size_t j = 0; j < p; ++j) by_name[schema.categorical()[j].name] = {true, j};
    for (std::size_t j = 0; j < q; ++j) by_name[schema.continuous()[j]] = {false, j};
    std::vector<std::pair<bool, std::size_t>> layout;
    for (auto col : header) {
        auto it = by_name.find(std::string(trim(col)));
        if (it == by_name.end()) throw Error("data: header column '" + std::string(trim(col)) + "' not in schema");
        layout.push_back(it->second);
        by_name.erase(it);
    }

    const std::size_t n = lines.size() - 1;
    std::vector<LevelCode> codes(n * p);
    std::vector<double> values(n * q);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cells = split(lines[i + 1], ',');
        const std::string where = "data: row " + std::to_string(i + 1);
        if (cells.size() != layout.size())
            throw Error(where + ": expected " + std::to_string(layout.size()) + " columns, got " +
                        std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto cell = trim(cells[c]);
            const auto [is_cat, j] = layout[c];
            if (is_cat) {
                const int code = schema.level_code(j, cell);
                if (code < 0)
                    throw Error(where + ": unknown level '" + std::string(cell) + "' for attribute '" +
                                schema.categorical()[j].name + "'");
                codes[i * p + j] = static_cast<LevelCode>(code);
            } else {
                if (cell.empty())
                    throw Error(where + ": missing value for '" + schema.continuous()[j] +
                                "' (missing values are unsupported)");
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
                    throw Error(where + ": non-numeric value '" + std::string(cell) + "' for '" +
                                schema.continuous()[j] + "'");
                values[i * q + j] = v;
            }
        }
    }
    if (n == 0) throw Error("data: no rows");
    return MixedDataset(schema, n, std::move(codes), std::move(values));
}

std::string serialize_dataset(const MixedDataset& ds) {
    const auto& schema = ds.schema();
    std::ostringstream out;
    bool first = true;
    for (const auto& attr : schema.categorical()) {
        out << (first ? "" : ",") << attr.name;
        first = false;
    }
    for (const auto& name : schema.continuous()) {
        out << (first ? "" : ",") << name;
        first = false;
    }
    out << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        first = true;
        auto x = ds.categorical(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
            out << (first ? "" : ",") << schema.categorical()[j].levels[x[j]];
            first = false;
        }
        for (double v : ds.continuous(i)) {
            out << (first ? "" : ",") << format_double(v);
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

ValidationReport validate(const MixedDataset& ds) {
    ValidationReport report;
    const auto& schema = ds.schema();
    const auto m = schema.level_counts();
    if (ds.size() == 0) report.violations.push_back("empty dataset");

    std::vector<std::vector<bool>> used(ds.p());
    for (std::size_t j = 0; j < ds.p(); ++j) used[j].assign(m[j], false);
    report.ranges.assign(ds.q(), ContinuousRange{});

    bool bad_code = false;
    bool bad_value = false;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto x = ds.categorical(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] >= m[j]) {
                if (!bad_code)
                    report.violations.push_back("row " + std::to_string(i) + ": level code out of range for '" +
                                                schema.categorical()[j].name + "'");
                bad_code = true;
            } else {
                used[j][x[j]] = true;
            }
        }
        auto z = ds.continuous(i);
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (!std::isfinite(z[j])) {
                if (!bad_value)
                    report.violations.push_back("row " + std::to_string(i) + ": non-finite value for '" +
                                                schema.continuous()[j] + "'");
                bad_value = true;
                continue;
            }
            auto& r = report.ranges[j];
            if (i == 0) {
                r.min = r.max = z[j];
            } else {
                r.min = std::min(r.min, z[j]);
                r.max = std::max(r.max, z[j]);
            }
        }
    }

    for (std::size_t j = 0; j < ds.p(); ++j) {
        const auto observed = static_cast<std::size_t>(std::count(used[j].begin(), used[j].end(), true));
        report.observed_levels.push_back(observed);
        if (ds.size() > 0 && observed < m[j])
            report.warnings.push_back("attribute '" + schema.categorical()[j].name + "' uses " +
                                      std::to_string(observed) + " of " + std::to_string(m[j]) +
                                      " declared levels; unused levels inflate the lattice size");
    }
    return report;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace mixedclust
