#pragma once

#include "mixedclust/dataset.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using mixedclust::CategoricalAttribute;
using mixedclust::LevelCode;
using mixedclust::MixedDataset;
using mixedclust::Schema;

inline Schema make_schema(const std::vector<std::size_t>& levels, std::size_t q) {
    std::vector<CategoricalAttribute> cat;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        CategoricalAttribute a{"c" + std::to_string(j + 1), {}};
        for (std::size_t k = 0; k < levels[j]; ++k) a.levels.push_back("L" + std::to_string(k + 1));
        cat.push_back(std::move(a));
    }
    std::vector<std::string> cont;
    for (std::size_t j = 0; j < q; ++j) cont.push_back("z" + std::to_string(j + 1));
    return Schema(std::move(cat), std::move(cont));
}

inline MixedDataset random_dataset(const Schema& schema, std::size_t n, std::mt19937_64& rng, double spread = 1.0) {
    const auto m = schema.level_counts();
    std::vector<LevelCode> codes(n * schema.p());
    std::vector<double> values(n * schema.q());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            codes[i * m.size() + j] = static_cast<LevelCode>(std::uniform_int_distribution<std::size_t>(0, m[j] - 1)(rng));
    std::normal_distribution<double> normal(0.0, spread);
    for (auto& v : values) v = normal(rng);
    return MixedDataset(schema, n, std::move(codes), std::move(values));
}

inline Schema random_schema(std::mt19937_64& rng, std::size_t max_p, std::size_t max_levels, std::size_t max_q) {
    const std::size_t p = std::uniform_int_distribution<std::size_t>(1, max_p)(rng);
    const std::size_t q = std::uniform_int_distribution<std::size_t>(1, max_q)(rng);
    std::vector<std::size_t> levels(p);
    for (auto& m : levels) m = std::uniform_int_distribution<std::size_t>(2, max_levels)(rng);
    return make_schema(levels, q);
}

}  // namespace testing_support
