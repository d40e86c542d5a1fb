// Samplers that preserve relative visual density.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "sampling/samplers.hpp"
#include "scatteropt/sampling.hpp"

namespace scatteropt::sampling_detail {

namespace {

// Members of each grid cell, in index order.
std::vector<Indices> bucket_by_cell(Points points, int cells) {
    std::vector<Indices> buckets(static_cast<std::size_t>(cells) * cells);
    for (std::size_t i = 0; i < points.size(); ++i)
        buckets[grid_cell(points[i], cells)].push_back(static_cast<std::uint32_t>(i));
    return buckets;
}

// Uniform draw of `take` members from `members`, appended to `out`.
void draw_from(const Indices& members, std::size_t take, Rng& rng, Indices& out) {
    if (take == 0) return;
    for (std::uint32_t local : random_subset(members.size(), take, rng)) out.push_back(members[local]);
}

}  // namespace

Indices density_biased(Points points, std::size_t budget, Rng& rng) {
    // Selection weight inversely proportional to the local cell density.
    const auto counts = cell_counts(points, kDensityCells);
    std::vector<double> weights(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        weights[i] = 1.0 / static_cast<double>(counts[grid_cell(points[i], kDensityCells)]);
    return weighted_subset(weights, budget, rng);
}

Indices non_uniform(Points points, std::size_t budget, Rng& rng) {
    // Per-cell quota proportional to sqrt(cell count): dense cells keep more
    // points in absolute terms but fewer relative to their size.
    const auto buckets = bucket_by_cell(points, kDensityCells);
    std::vector<double> weights(buckets.size());
    std::vector<std::size_t> caps(buckets.size());
    for (std::size_t c = 0; c < buckets.size(); ++c) {
        caps[c] = buckets[c].size();
        weights[c] = std::sqrt(static_cast<double>(caps[c]));
    }
    const auto quota = apportion(weights, caps, budget);
    Indices out;
    out.reserve(budget);
    for (std::size_t c = 0; c < buckets.size(); ++c) draw_from(buckets[c], quota[c], rng, out);
    std::sort(out.begin(), out.end());
    return out;
}

Indices svd_based(Points points, std::size_t budget) {
    // Rows ranked by leverage on the top-k right singular vectors of the
    // mean-centered n x 2 data matrix (k = 2 for planar data).
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>> raw(&points.front().x, n, 2);
    const Eigen::MatrixX2d centered = raw.rowwise() - raw.colwise().mean();
    const Eigen::JacobiSVD<Eigen::MatrixX2d> svd(centered, Eigen::ComputeFullV);
    const Eigen::Vector2d sigma = svd.singularValues();
    const Eigen::MatrixX2d projected = centered * svd.matrixV();

    constexpr int kBasis = 2;
    const double floor = sigma(0) * 1e-12;
    std::vector<double> score(points.size(), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < kBasis; ++j) {
            if (sigma(j) <= floor) continue;
            const double u = projected(i, j) / sigma(j);
            s += u * u;
        }
        score[static_cast<std::size_t>(i)] = s;
    }
    Indices order(points.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return score[a] > score[b]; });
    order.resize(budget);
    std::sort(order.begin(), order.end());
    return order;
}

Indices multi_view_z_order(Points points, std::size_t budget, Rng& rng) {
    // Walk the Z-order curve in `budget` contiguous segments and take one
    // point per segment, choosing the grid cell whose addition most reduces
    // the squared error between the smoothed histogram of the selection and
    // the (scaled) smoothed histogram of the full data.
    const std::size_t n = points.size();
    constexpr int g = kDensityCells;
    constexpr std::array<double, 3> k1{0.25, 0.5, 0.25};

    std::vector<std::pair<std::uint32_t, std::uint32_t>> curve(n);
    for (std::size_t i = 0; i < n; ++i) curve[i] = {morton_code(points[i]), static_cast<std::uint32_t>(i)};
    std::sort(curve.begin(), curve.end());

    std::vector<int> cell(n);
    for (std::size_t i = 0; i < n; ++i) cell[i] = grid_cell(points[i], g);

    // Target: histogram blurred by a 3x3 binomial kernel, normalized to sum 1.
    std::vector<double> target(static_cast<std::size_t>(g) * g, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int cx = cell[i] % g, cy = cell[i] / g;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = cx + dx, y = cy + dy;
                if (x >= 0 && x < g && y >= 0 && y < g) target[y * g + x] += k1[dx + 1] * k1[dy + 1];
            }
    }
    const double mass = std::accumulate(target.begin(), target.end(), 0.0);
    for (double& t : target) t /= mass;

    std::vector<double> selected(target.size(), 0.0);
    const auto gain = [&](int c, double scale) {
        // Change in sum (selected - scale*target)^2 when adding one kernel at c.
        const int cx = c % g, cy = c / g;
        double delta = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = cx + dx, y = cy + dy;
                if (x < 0 || x >= g || y < 0 || y >= g) continue;
                const double k = k1[dx + 1] * k1[dy + 1];
                const double r = selected[y * g + x] - scale * target[y * g + x];
                delta += k * (2.0 * r + k);
            }
        return delta;
    };

    Indices out;
    out.reserve(budget);
    std::vector<std::uint32_t> in_cell;
    for (std::size_t s = 0; s < budget; ++s) {
        const std::size_t lo = s * n / budget;
        const std::size_t hi = (s + 1) * n / budget;
        const double scale = static_cast<double>(s + 1);
        int best_cell = -1;
        double best_gain = HUGE_VAL;
        for (std::size_t p = lo; p < hi; ++p) {
            const int c = cell[curve[p].second];
            if (c == best_cell) continue;
            const double d = gain(c, scale);
            if (d < best_gain) {
                best_gain = d;
                best_cell = c;
            }
        }
        in_cell.clear();
        for (std::size_t p = lo; p < hi; ++p)
            if (cell[curve[p].second] == best_cell) in_cell.push_back(curve[p].second);
        out.push_back(in_cell[rng.below(in_cell.size())]);

        const int cx = best_cell % g, cy = best_cell / g;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = cx + dx, y = cy + dy;
                if (x >= 0 && x < g && y >= 0 && y < g) selected[y * g + x] += k1[dx + 1] * k1[dy + 1];
            }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct Box {
    double x0, y0, x1, y1;
};

// Splits the box at its spatial midpoint along the longer side until a leaf
// holds at most `capacity` points. Leaves are appended in traversal order.
void subdivide(Points points, Indices::iterator first, Indices::iterator last, Box box, std::size_t capacity,
               int depth, std::vector<Indices>& leaves) {
    const auto count = static_cast<std::size_t>(last - first);
    if (count == 0) return;
    if (count <= capacity || depth >= 40) {
        leaves.emplace_back(first, last);
        return;
    }
    const bool split_x = (box.x1 - box.x0) >= (box.y1 - box.y0);
    const double mid = split_x ? 0.5 * (box.x0 + box.x1) : 0.5 * (box.y0 + box.y1);
    const auto pivot = std::stable_partition(first, last, [&](std::uint32_t i) {
        return split_x ? points[i].x < mid : points[i].y < mid;
    });
    Box lower = box, upper = box;
    if (split_x) {
        lower.x1 = upper.x0 = mid;
    } else {
        lower.y1 = upper.y0 = mid;
    }
    subdivide(points, first, pivot, lower, capacity, depth + 1, leaves);
    subdivide(points, pivot, last, upper, capacity, depth + 1, leaves);
}

}  // namespace

Indices recursive_subdivision(Points points, std::size_t budget, Rng& rng) {
    // Leaves sized for about four samples each. Every leaf keeps at least one
    // point when the budget allows (sparse leaves are where outliers live);
    // the rest is apportioned by leaf population. With fewer samples than
    // leaves, leaves are chosen by a population-weighted draw.
    const std::size_t n = points.size();
    const std::size_t capacity = std::max<std::size_t>(2, (4 * n + budget - 1) / budget);
    Indices all(n);
    std::iota(all.begin(), all.end(), 0u);
    std::vector<Indices> leaves;
    subdivide(points, all.begin(), all.end(), {0.0, 0.0, 1.0, 1.0}, capacity, 0, leaves);

    const std::size_t m = leaves.size();
    std::vector<std::size_t> quota(m, 0);
    if (budget >= m) {
        std::vector<double> weights(m);
        std::vector<std::size_t> caps(m);
        for (std::size_t l = 0; l < m; ++l) {
            weights[l] = static_cast<double>(leaves[l].size());
            caps[l] = leaves[l].size() - 1;
        }
        quota = apportion(weights, caps, budget - m);
        for (auto& q : quota) ++q;
    } else {
        std::vector<double> weights(m);
        for (std::size_t l = 0; l < m; ++l) weights[l] = static_cast<double>(leaves[l].size());
        for (std::uint32_t l : weighted_subset(weights, budget, rng)) quota[l] = 1;
    }

    Indices out;
    out.reserve(budget);
    for (std::size_t l = 0; l < m; ++l) draw_from(leaves[l], quota[l], rng, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace scatteropt::sampling_detail
