#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mixedclust {

/// Raised for malformed input, invariant violations and bad configuration.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using LevelCode = std::uint16_t;

struct CategoricalAttribute {
    std::string name;
    std::vector<std::string> levels;

    bool operator==(const CategoricalAttribute&) const = default;
};

/// Attribute layout of a mixed data set: p categorical attributes with
/// declared level sets followed by q continuous attributes.
class Schema {
public:
    Schema() = default;
    Schema(std::vector<CategoricalAttribute> categorical, std::vector<std::string> continuous);

    std::size_t p() const { return categorical_.size(); }
    std::size_t q() const { return continuous_.size(); }

    const std::vector<CategoricalAttribute>& categorical() const { return categorical_; }
    const std::vector<std::string>& continuous() const { return continuous_; }

    /// Declared level counts m_1..m_p.
    std::vector<std::size_t> level_counts() const;

    /// Code of `level` within attribute j, or -1 when it is not declared.
    int level_code(std::size_t j, std::string_view level) const;

    bool operator==(const Schema&) const = default;

private:
    std::vector<CategoricalAttribute> categorical_;
    std::vector<std::string> continuous_;
};

/// n rows of (categorical level codes, continuous values). Storage is
/// row-major for both parts. Immutable after construction.
class MixedDataset {
public:
    MixedDataset() = default;

    /// Only checks that the buffers have n*p and n*q entries; see validate().
    MixedDataset(Schema schema, std::size_t n, std::vector<LevelCode> codes, std::vector<double> values);

    const Schema& schema() const { return schema_; }
    std::size_t size() const { return n_; }
    std::size_t p() const { return schema_.p(); }
    std::size_t q() const { return schema_.q(); }

    std::span<const LevelCode> categorical(std::size_t i) const {
        return {codes_.data() + i * p(), p()};
    }
    std::span<const double> continuous(std::size_t i) const {
        return {values_.data() + i * q(), q()};
    }

    const std::vector<LevelCode>& codes() const { return codes_; }
    const std::vector<double>& values() const { return values_; }

    /// Copy of the listed rows, in the listed order.
    MixedDataset subset(std::span<const std::size_t> rows) const;

private:
    Schema schema_;
    std::size_t n_ = 0;
    std::vector<LevelCode> codes_;
    std::vector<double> values_;
};

struct ContinuousRange {
    double min = 0.0;
    double max = 0.0;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    /// Distinct levels observed per categorical attribute.
    std::vector<std::size_t> observed_levels;
    std::vector<ContinuousRange> ranges;

    bool ok() const { return violations.empty(); }
};

Schema parse_schema(std::string_view text);
std::string serialize_schema(const Schema& schema);

MixedDataset load_dataset(std::string_view table, const Schema& schema);
std::string serialize_dataset(const MixedDataset& ds);

ValidationReport validate(const MixedDataset& ds);

std::string read_file(const std::string& path);

}  // namespace mixedclust
