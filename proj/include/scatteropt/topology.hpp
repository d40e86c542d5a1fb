#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "scatteropt/field.hpp"

namespace scatteropt {

/// One superlevel-set component: born at density `birth` (its peak), dies at
/// `death` when it merges into an older component.
struct MergeNode {
    double birth = 0.0;
    double death = 0.0;
    double persistence = 0.0;
    int birth_cell = -1;
};

struct MergeTree {
    std::vector<MergeNode> nodes;  ///< in order of birth (highest first)
    std::optional<std::size_t> root;

    bool empty() const { return nodes.empty(); }
};

/// Maximal constant segment of the threshold plot.
struct Bar {
    std::size_t count = 0;
    double t_min = 0.0;
    double t_max = 0.0;
    double saliency = 0.0;

    friend bool operator==(const Bar&, const Bar&) = default;
};

/// count(tau) = number of merge-tree nodes with persistence >= tau, stored as
/// bars in ascending threshold order (so with strictly decreasing counts).
struct ThresholdPlot {
    std::vector<Bar> bars;
    double domain_max = 0.0;

    std::size_t count_at(double tau) const;
    friend bool operator==(const ThresholdPlot&, const ThresholdPlot&) = default;
};

struct ClusterRange {
    std::size_t min = 1;
    std::size_t max = 1;

    bool contains(std::size_t c) const { return c >= min && c <= max; }
    friend bool operator==(const ClusterRange&, const ClusterRange&) = default;
};

struct SaliencyScore {
    double value = 0.0;
    std::size_t count = 0;  ///< cluster count of the winning bar; 0 when no bar qualifies
    std::optional<ClusterRange> range;

    friend bool operator==(const SaliencyScore&, const SaliencyScore&) = default;
};

/// Superlevel-set merge tree under 8-connectivity. Cells with density 0 never
/// join a component; every component still alive at the end dies at 0.
/// Zero-persistence components (plateau artifacts) are not recorded.
MergeTree build_merge_tree(const DensityField& field);

ThresholdPlot threshold_plot(const MergeTree& tree);

/// Longest bar, restricted to `range` when given; ties go to the smaller count.
SaliencyScore saliency(const ThresholdPlot& plot, std::optional<ClusterRange> range = {});

/// Exact area under the step function count(tau).
double auc(const ThresholdPlot& plot);

/// Sum of node persistences; equals auc(threshold_plot(tree)).
double total_persistence(const MergeTree& tree);

enum class Similarity { Similar, SomewhatSimilar, Dissimilar };
std::string_view to_string(Similarity s);

enum class BinMode { EqualWidth, EqualPopulation };

/// Three-bin partition of AUC values for perceptual-similarity classes.
struct AucBins {
    double lower_edge = 0.0;
    double upper_edge = 0.0;

    int bin(double auc_value) const;
    /// Same bin: Similar; adjacent bins: SomewhatSimilar; first and last: Dissimilar.
    Similarity classify(double a, double b) const;
};

/// Throws InvalidArgument with fewer than two distinct values.
AucBins auc_bins(std::span<const double> aucs, BinMode mode = BinMode::EqualWidth);

enum class SaliencyLevel { Low, Medium, High };
std::string_view to_string(SaliencyLevel level);

struct SaliencyBins {
    double lower_edge = 0.0;
    double upper_edge = 0.0;
    double max = 0.0;

    SaliencyLevel classify(double score) const;
};

/// Equal-width bins over [0, max]. Throws InvalidArgument if every score is 0.
SaliencyBins saliency_bins(std::span<const double> scores);

}  // namespace scatteropt
