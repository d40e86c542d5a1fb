#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "scatteropt/error.hpp"
#include "scatteropt/rng.hpp"
#include "scatteropt/topology.hpp"

using namespace scatteropt;

namespace {

DensityField field_from(int w, int h, std::vector<double> values) {
    DensityField f;
    f.width = w;
    f.height = h;
    f.values = std::move(values);
    return f;
}

MergeTree tree_of(std::vector<double> persistences) {
    MergeTree tree;
    for (double p : persistences) tree.nodes.push_back({p, 0.0, p, -1});
    return tree;
}

}  // namespace

TEST_CASE("merge tree of an all-zero field is empty") {
    const auto tree = build_merge_tree(field_from(4, 4, std::vector<double>(16, 0.0)));
    CHECK(tree.nodes.empty());
    CHECK_FALSE(tree.root.has_value());
}

TEST_CASE("merge tree of a single bump") {
    std::vector<double> v(25, 0.0);
    v[12] = 0.5;
    const auto tree = build_merge_tree(field_from(5, 5, v));
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].birth == 0.5);
    CHECK(tree.nodes[0].death == 0.0);
    CHECK(tree.nodes[0].persistence == 0.5);
    CHECK(tree.root == 0u);
}

TEST_CASE("merge tree of the row 0,3,1,5,0") {
    const auto tree = build_merge_tree(field_from(5, 1, {0, 3, 1, 5, 0}));
    REQUIRE(tree.nodes.size() == 2);
    CHECK(tree.nodes[0].birth == 5);
    CHECK(tree.nodes[0].death == 0);
    CHECK(tree.nodes[0].persistence == 5);
    CHECK(tree.nodes[1].birth == 3);
    CHECK(tree.nodes[1].death == 1);
    CHECK(tree.nodes[1].persistence == 2);
    CHECK(tree.root == 0u);

    // Flood fill at {5, 3, 1, 0+} sees 1, 2, 2, 1 components just below each level.
    const auto f = field_from(5, 1, {0, 3, 1, 5, 0});
    CHECK(oracle::components_above(f, 4.5) == 1);
    CHECK(oracle::components_above(f, 2.5) == 2);
    CHECK(oracle::components_above(f, 1.5) == 2);
    CHECK(oracle::components_above(f, 0.5) == 1);
}

TEST_CASE("diagonal neighbours are connected") {
    // 2 . .
    // . 1 .   the two positive cells touch at a corner
    const auto tree = build_merge_tree(field_from(3, 2, {2, 0, 0, 0, 1, 0}));
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].persistence == 2);
}

TEST_CASE("components separated by zeros all die at zero") {
    const auto tree = build_merge_tree(field_from(5, 1, {4, 0, 2, 0, 3}));
    REQUIRE(tree.nodes.size() == 3);
    for (const auto& n : tree.nodes) CHECK(n.death == 0.0);
    CHECK(tree.nodes[*tree.root].birth == 4);
}

TEST_CASE("plateaus produce no zero-persistence nodes") {
    const auto tree = build_merge_tree(field_from(4, 1, {2, 2, 2, 2}));
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].persistence == 2);
    for (const auto& n : tree.nodes) CHECK(n.persistence > 0.0);
}

TEST_CASE("merge tree counts match flood fill on random fields") {
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const int w = 1 + static_cast<int>(rng.below(9));
        const int h = 1 + static_cast<int>(rng.below(9));
        std::vector<double> v(static_cast<std::size_t>(w) * h);
        for (auto& x : v) x = static_cast<double>(rng.below(10));
        const auto f = field_from(w, h, v);
        const auto tree = build_merge_tree(f);
        for (int t2 = 0; t2 < 20; ++t2) {
            const double tau = 0.5 * t2;
            REQUIRE(oracle::tree_components(tree, tau) == oracle::components_above(f, tau));
        }
    }
}

TEST_CASE("threshold plot examples") {
    SUBCASE("empty") {
        const auto plot = threshold_plot(MergeTree{});
        CHECK(plot.bars.empty());
        CHECK(plot.domain_max == 0.0);
        CHECK(auc(plot) == 0.0);
        CHECK(saliency(plot).value == 0.0);
        CHECK(saliency(plot).count == 0);
    }
    SUBCASE("single node") {
        const auto plot = threshold_plot(tree_of({0.5}));
        REQUIRE(plot.bars.size() == 1);
        CHECK(plot.bars[0] == Bar{1, 0.0, 0.5, 0.5});
        CHECK(auc(plot) == 0.5);
    }
    SUBCASE("persistences 5 and 2") {
        const auto plot = threshold_plot(tree_of({5, 2}));
        REQUIRE(plot.bars.size() == 2);
        CHECK(plot.bars[0] == Bar{2, 0.0, 2.0, 2.0});
        CHECK(plot.bars[1] == Bar{1, 2.0, 5.0, 3.0});
        CHECK(plot.domain_max == 5.0);
        CHECK(auc(plot) == 7.0);
        // Direct evaluation of count(tau) = #{rho >= tau}.
        for (double tau : {0.0, 0.5, 1.99, 2.0, 2.01, 4.9, 5.0, 5.01})
            CHECK(plot.count_at(tau) == static_cast<std::size_t>((5 >= tau) + (2 >= tau)));

        const auto best = saliency(plot);
        CHECK(best.value == 3.0);
        CHECK(best.count == 1);
        const auto ranged = saliency(plot, ClusterRange{2, 10});
        CHECK(ranged.value == 2.0);
        CHECK(ranged.count == 2);
        CHECK(saliency(plot, ClusterRange{3, 10}).value == 0.0);
    }
    SUBCASE("repeated persistences share a bar") {
        const auto plot = threshold_plot(tree_of({1, 3, 3}));
        REQUIRE(plot.bars.size() == 2);
        CHECK(plot.bars[0] == Bar{3, 0.0, 1.0, 1.0});
        CHECK(plot.bars[1] == Bar{2, 1.0, 3.0, 2.0});
    }
}

TEST_CASE("saliency ties go to the smaller count") {
    const auto plot = threshold_plot(tree_of({4, 2}));  // bars of length 2 at counts 2 and 1
    const auto best = saliency(plot);
    CHECK(best.value == 2.0);
    CHECK(best.count == 1);
}

TEST_CASE("plot is non-increasing and AUC equals total persistence") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(64);
        for (auto& x : v) x = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
        const auto tree = build_merge_tree(field_from(8, 8, v));
        const auto plot = threshold_plot(tree);
        for (std::size_t i = 1; i < plot.bars.size(); ++i) {
            CHECK(plot.bars[i].count < plot.bars[i - 1].count);
            CHECK(plot.bars[i].t_min == plot.bars[i - 1].t_max);
        }
        CHECK(std::abs(auc(plot) - total_persistence(tree)) <= 1e-12);
    }
}

TEST_CASE("topology is scale equivariant") {
    Rng rng(3);
    std::vector<double> v(100);
    for (auto& x : v) x = rng.uniform() < 0.4 ? 0.0 : rng.uniform();
    const auto base_tree = build_merge_tree(field_from(10, 10, v));
    const auto base_plot = threshold_plot(base_tree);
    const auto base_score = saliency(base_plot);
    for (double c : {0.5, 2.0, 10.0}) {
        auto scaled = v;
        for (auto& x : scaled) x *= c;
        const auto tree = build_merge_tree(field_from(10, 10, scaled));
        REQUIRE(tree.nodes.size() == base_tree.nodes.size());
        for (std::size_t i = 0; i < tree.nodes.size(); ++i)
            CHECK(tree.nodes[i].persistence == doctest::Approx(c * base_tree.nodes[i].persistence).epsilon(1e-12));
        const auto plot = threshold_plot(tree);
        REQUIRE(plot.bars.size() == base_plot.bars.size());
        const auto score = saliency(plot);
        CHECK(score.value == doctest::Approx(c * base_score.value).epsilon(1e-12));
        CHECK(score.count == base_score.count);
        CHECK(auc(plot) == doctest::Approx(c * auc(base_plot)).epsilon(1e-12));
    }
}

TEST_CASE("AUC bins") {
    std::vector<double> aucs;
    for (int i = 0; i <= 9; ++i) aucs.push_back(i);
    const auto bins = auc_bins(aucs);
    CHECK(bins.lower_edge == doctest::Approx(3.0));
    CHECK(bins.upper_edge == doctest::Approx(6.0));
    CHECK(bins.classify(1, 8) == Similarity::Dissimilar);
    CHECK(bins.classify(1, 2) == Similarity::Similar);
    CHECK(bins.classify(2, 4) == Similarity::SomewhatSimilar);
    CHECK(to_string(Similarity::Dissimilar) == "DS");

    const auto pop = auc_bins(aucs, BinMode::EqualPopulation);
    CHECK(pop.lower_edge == doctest::Approx(3.0));
    CHECK(pop.upper_edge == doctest::Approx(6.0));

    const std::vector<double> constant{2.0, 2.0};
    CHECK_THROWS_AS(auc_bins(constant), InvalidArgument);
}

TEST_CASE("saliency bins") {
    const std::vector<double> scores{0.0, 0.05, 0.1};
    const auto bins = saliency_bins(scores);
    CHECK(bins.lower_edge == doctest::Approx(0.1 / 3));
    CHECK(bins.upper_edge == doctest::Approx(0.2 / 3));
    CHECK(bins.classify(0.0) == SaliencyLevel::Low);
    CHECK(bins.classify(0.05) == SaliencyLevel::Medium);
    CHECK(bins.classify(0.1) == SaliencyLevel::High);
    const std::vector<double> zeros{0.0};
    CHECK_THROWS_AS(saliency_bins(zeros), InvalidArgument);
}
