// Samplers that favour outliers. Outlier score is the distance to the 8th
// nearest neighbour (the inverse of a kNN density estimate).

#include <algorithm>
#include <numeric>

#include "sampling/samplers.hpp"
#include "scatteropt/sampling.hpp"

namespace scatteropt::sampling_detail {

Indices outlier_biased_density(Points points, std::size_t budget, Rng& rng) {
    const auto counts = cell_counts(points, kDensityCells);
    auto weights = outlier_boost(points);
    for (std::size_t i = 0; i < points.size(); ++i)
        weights[i] /= static_cast<double>(counts[grid_cell(points[i], kDensityCells)]);
    return weighted_subset(weights, budget, rng);
}

Indices outlier_biased_random(Points points, std::size_t budget, Rng& rng) {
    return weighted_subset(outlier_boost(points), budget, rng);
}

Indices hashmap_stratified(Points points, std::size_t budget, Rng& rng) {
    // Quantize positions into buckets, visit buckets in hashed order and draw
    // one point per bucket per round. Sparse buckets are exhausted early, so
    // isolated points survive even at low rates.
    constexpr int kCells = 32;
    const std::uint64_t salt = rng.next();
    std::vector<Indices> buckets(static_cast<std::size_t>(kCells) * kCells);
    for (std::size_t i = 0; i < points.size(); ++i)
        buckets[grid_cell(points[i], kCells)].push_back(static_cast<std::uint32_t>(i));

    struct Slot {
        std::uint64_t hash;
        Indices members;
    };
    std::vector<Slot> slots;
    for (std::size_t c = 0; c < buckets.size(); ++c) {
        if (buckets[c].empty()) continue;
        Indices members = std::move(buckets[c]);
        for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
        slots.push_back({splitmix64(c ^ salt), std::move(members)});
    }
    std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.hash < b.hash; });

    Indices out;
    out.reserve(budget);
    for (std::size_t round = 0; out.size() < budget; ++round) {
        for (const Slot& slot : slots) {
            if (round < slot.members.size()) {
                out.push_back(slot.members[round]);
                if (out.size() == budget) break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace scatteropt::sampling_detail
