#include <algorithm>
#include <cmath>
#include <numeric>

#include "sampling/samplers.hpp"
#include "scatteropt/sampling.hpp"

namespace scatteropt::sampling_detail {

namespace {

// Partial Fisher-Yates: the first `count` slots become a uniform draw.
Indices shuffled_prefix(std::size_t n, std::size_t count, Rng& rng) {
    Indices all(n);
    std::iota(all.begin(), all.end(), 0u);
    for (std::size_t i = 0; i < count && i + 1 < n; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(all[i], all[j]);
    }
    all.resize(count);
    return all;
}

}  // namespace

Indices random_subset(std::size_t n, std::size_t budget, Rng& rng) {
    auto out = shuffled_prefix(n, budget, rng);
    std::sort(out.begin(), out.end());
    return out;
}

Indices random_permutation(std::size_t n, Rng& rng) { return shuffled_prefix(n, n, rng); }

namespace {

struct Keyed {
    double key;
    std::uint32_t index;
};

bool key_greater(const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.index < b.index;
}

std::vector<Keyed> exponential_keys(std::span<const double> weights, Rng& rng) {
    std::vector<Keyed> keys(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double u = rng.uniform_open();
        // log(u)/w ranks identically to u^(1/w) without underflow.
        const double key = weights[i] > 0.0 ? std::log(u) / weights[i] : -HUGE_VAL;
        keys[i] = {key, static_cast<std::uint32_t>(i)};
    }
    return keys;
}

}  // namespace

Indices weighted_subset(std::span<const double> weights, std::size_t budget, Rng& rng) {
    auto keys = exponential_keys(weights, rng);
    std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(budget) - 1, keys.end(), key_greater);
    Indices out(budget);
    for (std::size_t i = 0; i < budget; ++i) out[i] = keys[i].index;
    std::sort(out.begin(), out.end());
    return out;
}

Indices weighted_order(std::span<const double> weights, Rng& rng) {
    auto keys = exponential_keys(weights, rng);
    std::sort(keys.begin(), keys.end(), key_greater);
    Indices out(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) out[i] = keys[i].index;
    return out;
}

int grid_cell(const Point& p, int cells) {
    const int cx = std::clamp(static_cast<int>(p.x * cells), 0, cells - 1);
    const int cy = std::clamp(static_cast<int>(p.y * cells), 0, cells - 1);
    return cy * cells + cx;
}

std::vector<std::uint32_t> cell_counts(Points points, int cells) {
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(cells) * cells, 0);
    for (const Point& p : points) ++counts[grid_cell(p, cells)];
    return counts;
}

std::vector<std::size_t> apportion(std::span<const double> weights, std::span<const std::size_t> caps,
                                   std::size_t total) {
    const std::size_t m = weights.size();
    std::vector<std::size_t> quota(m, 0);
    std::vector<bool> active(m, false);
    for (std::size_t i = 0; i < m; ++i) active[i] = caps[i] > 0 && weights[i] > 0.0;
    std::size_t remaining = total;

    // Water filling: saturate every item whose proportional share would
    // exceed its capacity, then round the rest by largest remainder.
    while (remaining > 0) {
        double weight_sum = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (active[i]) weight_sum += weights[i];
        if (weight_sum <= 0.0) break;

        bool saturated = false;
        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i]) continue;
            const double share = static_cast<double>(remaining) * weights[i] / weight_sum;
            if (static_cast<double>(quota[i]) + share >= static_cast<double>(caps[i])) {
                remaining -= caps[i] - quota[i];
                quota[i] = caps[i];
                active[i] = false;
                saturated = true;
            }
        }
        if (saturated) continue;

        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i]) continue;
            const double share = static_cast<double>(remaining) * weights[i] / weight_sum;
            const auto whole = static_cast<std::size_t>(std::floor(share));
            quota[i] += whole;
            assigned += whole;
            remainders.emplace_back(share - static_cast<double>(whole), i);
        }
        std::size_t leftover = remaining - std::min(assigned, remaining);
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (const auto& [frac, i] : remainders) {
            if (leftover == 0) break;
            if (quota[i] < caps[i]) {
                ++quota[i];
                --leftover;
            }
        }
        remaining = leftover;
        if (remaining > 0) {
            for (std::size_t i = 0; i < m; ++i) active[i] = active[i] && quota[i] < caps[i];
        }
    }
    // Zero-weight items absorb anything left, in index order.
    for (std::size_t i = 0; i < m && remaining > 0; ++i) {
        const std::size_t take = std::min(remaining, caps[i] - quota[i]);
        quota[i] += take;
        remaining -= take;
    }
    return quota;
}

std::vector<double> outlier_boost(Points points) {
    const auto dist = kth_neighbor_distance(points, kOutlierNeighbors);
    const double mean = std::accumulate(dist.begin(), dist.end(), 0.0) / static_cast<double>(dist.size());
    std::vector<double> boost(points.size(), 1.0);
    if (mean > 0.0) {
        for (std::size_t i = 0; i < points.size(); ++i) boost[i] = 1.0 + dist[i] / mean;
    }
    return boost;
}

std::vector<double> kth_neighbor_distance(std::span<const Point> points, std::size_t k) {
    const std::size_t n = points.size();
    std::vector<double> out(n, 0.0);
    if (n <= 1) return out;
    k = std::min(k, n - 1);

    // Bucket grid with about two points per cell.
    const int cells = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(n) / 2.0)), 1, 1024);
    const double cell_size = 1.0 / cells;
    std::vector<std::uint32_t> start(static_cast<std::size_t>(cells) * cells + 1, 0);
    std::vector<int> cell_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        cell_of[i] = grid_cell(points[i], cells);
        ++start[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < start.size(); ++c) start[c] += start[c - 1];
    std::vector<std::uint32_t> items(n);
    {
        auto fill = start;
        for (std::size_t i = 0; i < n; ++i) items[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
    }

    std::vector<double> best;  // max-heap of the k smallest squared distances
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = points[i];
        const int cx = cell_of[i] % cells;
        const int cy = cell_of[i] / cells;
        best.clear();
        for (int ring = 0; ring <= cells; ++ring) {
            for (int y = cy - ring; y <= cy + ring; ++y) {
                if (y < 0 || y >= cells) continue;
                const bool edge_row = (y == cy - ring || y == cy + ring);
                for (int x = cx - ring; x <= cx + ring; x += edge_row ? 1 : 2 * ring) {
                    if (x >= 0 && x < cells) {
                        const int c = y * cells + x;
                        for (std::uint32_t s = start[c]; s < start[c + 1]; ++s) {
                            const std::uint32_t j = items[s];
                            if (j == i) continue;
                            const double dx = points[j].x - p.x;
                            const double dy = points[j].y - p.y;
                            const double d2 = dx * dx + dy * dy;
                            if (best.size() < k) {
                                best.push_back(d2);
                                std::push_heap(best.begin(), best.end());
                            } else if (d2 < best.front()) {
                                std::pop_heap(best.begin(), best.end());
                                best.back() = d2;
                                std::push_heap(best.begin(), best.end());
                            }
                        }
                    }
                    if (ring == 0) break;
                }
            }
            // Anything outside ring r is at least r cells away.
            const double reach = ring * cell_size;
            if (best.size() == k && best.front() <= reach * reach) break;
        }
        out[i] = std::sqrt(best.front());
    }
    return out;
}

}  // namespace scatteropt::sampling_detail
