#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "scatteropt/error.hpp"
#include "scatteropt/rng.hpp"
#include "scatteropt/sampling.hpp"
#include "support.hpp"

using namespace scatteropt;

namespace {

PointSet uniform_points(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    PointSet set;
    set.name = "uniform";
    for (std::size_t i = 0; i < n; ++i) set.points.push_back({rng.uniform(), rng.uniform()});
    return set;
}

void check_contract(const PointSet& set, const SampleSpec& spec, const SampledSet& s) {
    const std::size_t budget = sample_budget(set.size(), spec.rate);
    CHECK(std::is_sorted(s.indices.begin(), s.indices.end()));
    CHECK(std::adjacent_find(s.indices.begin(), s.indices.end()) == s.indices.end());
    for (auto i : s.indices) CHECK(i < set.size());
    if (is_blue_noise(spec.kind)) {
        CHECK(std::abs(static_cast<double>(s.indices.size()) - static_cast<double>(budget)) <= 0.02 * budget);
    } else {
        CHECK(s.indices.size() == budget);
    }
}

}  // namespace

TEST_CASE("names round trip and categories are set") {
    std::set<std::string_view> names;
    for (SamplerKind kind : kAllSamplers) {
        names.insert(to_string(kind));
        CHECK(parse_sampler(to_string(kind)) == kind);
        CHECK(categories(kind) != 0);
        CHECK_FALSE(category_names(kind).empty());
    }
    CHECK(names.size() == 14);
    CHECK_FALSE(parse_sampler("nope").has_value());
}

TEST_CASE("default rate grid") {
    const auto rates = default_rates();
    REQUIRE(rates.size() == 19);
    CHECK(rates.front() == 0.05);
    CHECK(rates.back() == 0.95);
}

TEST_CASE("budget") {
    CHECK(sample_budget(20, 0.95) == 19);
    CHECK(sample_budget(10, 0.01) == 1);
    CHECK(sample_budget(10, 1.0) == 10);
}

TEST_CASE("every kind returns exactly 19 of 20 points at rate 0.95") {
    const auto set = uniform_points(20, 5);
    for (SamplerKind kind : kAllSamplers) {
        CAPTURE(to_string(kind));
        const auto s = sample(set, {kind, 0.95, 3});
        CHECK(s.indices.size() == 19);
        check_contract(set, {kind, 0.95, 3}, s);
    }
}

TEST_CASE("random sampling is deterministic per seed") {
    const auto set = uniform_points(1000, 1);
    const auto a = sample(set, {SamplerKind::Random, 0.05, 77});
    const auto b = sample(set, {SamplerKind::Random, 0.05, 77});
    CHECK(a.indices == b.indices);
    CHECK(a.indices.size() == 50);
    CHECK(sample(set, {SamplerKind::Random, 0.05, 78}).indices != a.indices);
}

TEST_CASE("invalid specs are rejected") {
    const auto set = uniform_points(10, 1);
    CHECK_THROWS_AS(sample(set, {SamplerKind::Random, 0.0, 1}), InvalidArgument);
    CHECK_THROWS_AS(sample(set, {SamplerKind::Random, 1.5, 1}), InvalidArgument);
    CHECK_THROWS_AS(sample(PointSet{}, {SamplerKind::Random, 0.5, 1}), InvalidArgument);
}

TEST_CASE("contracts hold for all kinds on random inputs") {
    Rng rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.below(600);
        const auto set = trial % 2 ? uniform_points(n, rng.next()) : testing::five_clusters(n, rng.next());
        const double rate = 0.01 + 0.99 * rng.uniform();
        const std::uint64_t seed = rng.next();
        for (SamplerKind kind : kAllSamplers) {
            CAPTURE(to_string(kind));
            CAPTURE(n);
            CAPTURE(rate);
            const SampleSpec spec{kind, rate, seed};
            const auto s = sample(set, spec);
            check_contract(set, spec, s);
            CHECK(sample(set, spec).indices == s.indices);
        }
    }
}

TEST_CASE("farthest point on four corners and the center") {
    const std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}};
    const std::set<std::uint32_t> corners{0, 1, 2, 3};
    for (std::size_t start = 0; start < pts.size(); ++start) {
        auto chosen = sampling_detail::farthest_point_order(pts, 4, start);
        std::set<std::uint32_t> got(chosen.begin(), chosen.end());
        REQUIRE(got.size() == 4);
        if (start < 4) {
            CHECK(got == corners);
        } else {
            CHECK(got.contains(4));
            std::vector<std::uint32_t> picked_corners;
            for (auto i : got)
                if (i != 4) picked_corners.push_back(i);
            CHECK(picked_corners.size() == 3);
            CHECK(oracle::min_pairwise_distance(pts, picked_corners) >= 1.0);
        }
    }
}

TEST_CASE("farthest point prefers larger rates as supersets") {
    const auto set = testing::five_clusters(400, 4);
    const auto small = sample(set, {SamplerKind::FarthestPoint, 0.1, 9});
    const auto large = sample(set, {SamplerKind::FarthestPoint, 0.3, 9});
    CHECK(std::includes(large.indices.begin(), large.indices.end(), small.indices.begin(), small.indices.end()));
}

TEST_CASE("blue noise keeps its reported radius") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto set = testing::five_clusters(1500, seed);
        for (SamplerKind kind : {SamplerKind::BlueNoise, SamplerKind::MultiClassBlueNoise,
                                 SamplerKind::OutlierBiasedBlueNoise}) {
            for (double rate : {0.05, 0.2, 0.5}) {
                const auto s = sample(set, {kind, rate, seed});
                CAPTURE(to_string(kind));
                CAPTURE(rate);
                CHECK(s.radius > 0.0);
                CHECK(oracle::min_pairwise_distance(set.points, s.indices) >= s.radius);
                check_contract(set, {kind, rate, seed}, s);
            }
        }
    }
}

TEST_CASE("outlier-biased samplers favour isolated points") {
    // 990 points in a tight blob plus 10 scattered outliers.
    Rng rng(5);
    PointSet set;
    set.name = "blob";
    for (int i = 0; i < 990; ++i) set.points.push_back({0.5 + 0.02 * (rng.uniform() - 0.5), 0.5 + 0.02 * (rng.uniform() - 0.5)});
    for (int i = 0; i < 10; ++i) set.points.push_back({0.05 + 0.09 * i, i % 2 ? 0.05 : 0.95});
    const auto outliers_kept = [&](SamplerKind kind) {
        std::size_t kept = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed)
            for (auto i : sample(set, {kind, 0.1, seed}).indices) kept += i >= 990;
        return kept;
    };
    const auto random_kept = outliers_kept(SamplerKind::Random);
    CHECK(outliers_kept(SamplerKind::OutlierBiasedRandom) > random_kept);
    CHECK(outliers_kept(SamplerKind::OutlierBiasedDensity) > random_kept);
}

TEST_CASE("z-order curve codes") {
    CHECK(sampling_detail::morton_code({0.0, 0.0}) == 0u);
    CHECK(sampling_detail::morton_code({1.0, 1.0}) == 0xFFFFFFFFu);
    CHECK(sampling_detail::morton_code({0.5, 0.0}) == 0x80000000u >> 1);
}

TEST_CASE("kth neighbour distance matches brute force") {
    const auto set = uniform_points(300, 8);
    const auto d = sampling_detail::kth_neighbor_distance(set.points, 8);
    for (std::size_t i = 0; i < set.size(); i += 17) {
        std::vector<double> all;
        for (std::size_t j = 0; j < set.size(); ++j)
            if (j != i) all.push_back(std::hypot(set.points[i].x - set.points[j].x, set.points[i].y - set.points[j].y));
        std::nth_element(all.begin(), all.begin() + 7, all.end());
        CHECK(d[i] == doctest::Approx(all[7]).epsilon(1e-12));
    }
}

TEST_CASE("timing table") {
    const auto set = uniform_points(2000, 2);
    const std::vector<double> rates{0.05};
    const std::vector<SamplerKind> kinds{SamplerKind::Random};
    const auto rows = time_samplers(set, rates, kinds, 3);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].median_ms > 0.0);
    CHECK(rows[0].reps == 3);
    std::ostringstream csv;
    write_timing_csv(csv, rows);
    CHECK(csv.str().rfind("kind,rate,median_ms,reps\nrandom,0.05,", 0) == 0);
}
