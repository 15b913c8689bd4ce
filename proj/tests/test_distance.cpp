#include "mixedclust/distance.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace mixedclust;

namespace {

// Linear scan over the right-closed bins.
std::size_t locate_oracle(const Bins& bins, double d) {
    if (d <= bins.edges[1]) return 0;
    for (std::size_t j = 1; j < bins.count(); ++j)
        if (d > bins.edges[j] && d <= bins.edges[j + 1]) return j;
    return bins.count();
}

}  // namespace

TEST_CASE("hamming distance") {
    const std::vector<LevelCode> a{0, 1, 2}, b{0, 1, 3}, c{5, 5, 5};
    CHECK(hamming(a, a) == 0);
    CHECK(hamming(a, b) == 1);
    CHECK(hamming(std::vector<LevelCode>{0, 1}, std::vector<LevelCode>{2, 3}) == 2);
    CHECK(hamming(a, c) == 3);
    CHECK_THROWS_AS(hamming(a, std::vector<LevelCode>{0}), Error);
}

TEST_CASE("euclidean distance") {
    const std::vector<double> o{0.0, 0.0}, t{3.0, 4.0};
    CHECK(euclidean(o, o) == 0.0);
    CHECK(euclidean(o, t) == 5.0);
    CHECK(euclidean(std::vector<double>{1.0}, std::vector<double>{-2.0}) == 3.0);
    CHECK_THROWS_AS(euclidean(o, std::vector<double>{1.0}), Error);
}

TEST_CASE("hd vector examples") {
    const auto s = testing_support::make_schema({2, 2}, 0);
    MixedDataset ds(s, 4, {0, 0, 0, 1, 1, 1, 1, 0}, {});
    const std::vector<LevelCode> ref{0, 0};
    CHECK(hd_vector(ds, ref) == std::vector<std::size_t>{1, 2, 1});

    MixedDataset same(s, 3, {1, 0, 1, 0, 1, 0}, {});
    CHECK(hd_vector(same, std::vector<LevelCode>{1, 0}) == std::vector<std::size_t>{3, 0, 0});

    MixedDataset one(s, 1, {1, 1}, {});
    CHECK(hd_vector(one, ref) == std::vector<std::size_t>{0, 0, 1});
}

TEST_CASE("bins") {
    SUBCASE("equal width edges") {
        const auto b = make_bins(5.0, 10);
        REQUIRE(b.edges.size() == 11);
        for (std::size_t j = 0; j <= 10; ++j) CHECK(b.edges[j] == doctest::Approx(0.5 * j).epsilon(1e-15));
    }
    SUBCASE("degenerate maximum puts everything in bin 1") {
        const auto b = make_bins(0.0, 10);
        const std::vector<double> d{0.0, 0.0, 0.0};
        CHECK(bin_counts(d, b) == std::vector<std::size_t>{3, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    }
    SUBCASE("single bin") {
        const auto b = make_bins(2.0, 1);
        const std::vector<double> d{0.0, 1.0, 2.0};
        CHECK(bin_counts(d, b) == std::vector<std::size_t>{3});
    }
    SUBCASE("direct binning") {
        Bins b{{0.0, 1.0, 2.0, 3.0}};
        const std::vector<double> d{0.0, 0.4, 2.6};
        CHECK(bin_counts(d, b) == std::vector<std::size_t>{2, 0, 1});
    }
    SUBCASE("interior edge is right-closed") {
        Bins b{{0.0, 1.0, 2.0, 3.0}};
        CHECK(b.locate(1.0) == 0);
        CHECK(b.locate(2.0) == 1);
        CHECK(b.locate(3.0) == 2);
        CHECK(b.locate(3.5) == 3);
        const std::vector<double> d{3.5};
        CHECK_THROWS_AS(bin_counts(d, b), Error);
    }
    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(make_bins(1.0, 0), Error);
        CHECK_THROWS_AS(make_bins(-1.0, 3), Error);
        CHECK_THROWS_AS(make_bins(std::nan(""), 3), Error);
    }
}

TEST_CASE("locate agrees with a linear scan, edges included") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const double d_max = std::exp(std::uniform_real_distribution<double>(-8.0, 8.0)(rng));
        const std::size_t l = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
        const auto b = make_bins(d_max, l);
        for (std::size_t j = 0; j <= l; ++j) CHECK(b.locate(b.edges[j]) == locate_oracle(b, b.edges[j]));
        for (int k = 0; k < 50; ++k) {
            const double d = unit(rng) * d_max * 1.1;
            CHECK(b.locate(d) == locate_oracle(b, d));
        }
    }
}

TEST_CASE("distance vectors sum to n") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto s = testing_support::random_schema(rng, 5, 5, 4);
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
        const auto ds = testing_support::random_dataset(s, n, rng);
        const auto prof = distance_profile(ds, n / 2, 10);
        CHECK(std::accumulate(prof.hd_counts.begin(), prof.hd_counts.end(), std::size_t{0}) == n);
        CHECK(std::accumulate(prof.ed_counts.begin(), prof.ed_counts.end(), std::size_t{0}) == n);
        CHECK(prof.hd_counts.size() == s.p() + 1);
        CHECK(prof.ed_counts[0] >= 1);
    }
}

TEST_CASE("hd vector is invariant under level relabeling") {
    std::mt19937_64 rng(9);
    const auto s = testing_support::make_schema({3, 4, 5}, 0);
    const auto ds = testing_support::random_dataset(s, 80, rng);
    std::vector<std::vector<LevelCode>> maps;
    for (auto m : s.level_counts()) {
        std::vector<LevelCode> map(m);
        std::iota(map.begin(), map.end(), 0);
        std::shuffle(map.begin(), map.end(), rng);
        maps.push_back(map);
    }
    std::vector<LevelCode> codes(ds.codes().size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = 0; j < 3; ++j) codes[i * 3 + j] = maps[j][ds.categorical(i)[j]];
    MixedDataset relabeled(s, ds.size(), codes, {});
    for (std::size_t r = 0; r < ds.size(); r += 7)
        CHECK(hd_vector(ds, ds.categorical(r)) == hd_vector(relabeled, relabeled.categorical(r)));
}

TEST_CASE("ed vector is invariant under rotation and translation") {
    std::mt19937_64 rng(21);
    const auto s = testing_support::make_schema({2}, 2);
    const auto ds = testing_support::random_dataset(s, 60, rng);
    const double angle = 0.731;
    const double c = std::cos(angle), sn = std::sin(angle);
    std::vector<double> values(ds.values().size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto z = ds.continuous(i);
        values[i * 2] = c * z[0] - sn * z[1] + 4.0;
        values[i * 2 + 1] = sn * z[0] + c * z[1] - 2.5;
    }
    MixedDataset moved(s, ds.size(), ds.codes(), values);
    for (std::size_t r = 0; r < ds.size(); r += 5) {
        const auto a = ed_distances(ds, ds.continuous(r));
        const auto b = ed_distances(moved, moved.continuous(r));
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-9));
        const auto pa = distance_profile(ds, r, 10);
        const auto pb = distance_profile(moved, r, 10);
        CHECK(pa.ed_counts == pb.ed_counts);
    }
}
