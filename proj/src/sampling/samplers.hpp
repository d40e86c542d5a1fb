#pragma once

// Internal interface shared by the sampler implementations. Every sampler
// receives normalized points, a budget in [1, n] and a private RNG stream,
// and returns sorted unique indices.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scatteropt/dataset.hpp"
#include "scatteropt/rng.hpp"

namespace scatteropt::sampling_detail {

using Indices = std::vector<std::uint32_t>;
using Points = std::span<const Point>;

inline constexpr int kDensityCells = 20;  // shared with the density histogram
inline constexpr std::size_t kOutlierNeighbors = 8;

// common.cpp
Indices random_subset(std::size_t n, std::size_t budget, Rng& rng);
Indices random_permutation(std::size_t n, Rng& rng);
/// Weighted sampling without replacement (exponential keys). Zero weights are
/// only drawn once every positive weight is exhausted.
Indices weighted_subset(std::span<const double> weights, std::size_t budget, Rng& rng);
/// Indices ordered by descending weighted key; the first k are a weighted
/// sample of size k.
Indices weighted_order(std::span<const double> weights, Rng& rng);
int grid_cell(const Point& p, int cells);
std::vector<std::uint32_t> cell_counts(Points points, int cells);
/// Integer quotas summing to `total`, proportional to weights, each within
/// its capacity. Requires total <= sum(caps).
std::vector<std::size_t> apportion(std::span<const double> weights, std::span<const std::size_t> caps,
                                   std::size_t total);
/// Outlier boost per point: 1 + d_k / mean(d_k).
std::vector<double> outlier_boost(Points points);

// density.cpp
Indices density_biased(Points points, std::size_t budget, Rng& rng);
Indices non_uniform(Points points, std::size_t budget, Rng& rng);
Indices svd_based(Points points, std::size_t budget);
Indices multi_view_z_order(Points points, std::size_t budget, Rng& rng);
Indices recursive_subdivision(Points points, std::size_t budget, Rng& rng);

// outlier.cpp
Indices outlier_biased_density(Points points, std::size_t budget, Rng& rng);
Indices outlier_biased_random(Points points, std::size_t budget, Rng& rng);
Indices hashmap_stratified(Points points, std::size_t budget, Rng& rng);

// separation.cpp
struct BlueNoiseResult {
    Indices indices;
    double radius = 0.0;
};
/// Dart throwing over `order` with the radius bisected until the accepted
/// count lands within 2% of the budget.
BlueNoiseResult blue_noise(Points points, std::size_t budget, const Indices& order);
Indices farthest_point(Points points, std::size_t budget, Rng& rng);
Indices z_order(Points points, std::size_t budget, Rng& rng);

}  // namespace scatteropt::sampling_detail
