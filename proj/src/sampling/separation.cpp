// Samplers that preserve spatial separation.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sampling/samplers.hpp"
#include "scatteropt/sampling.hpp"

namespace scatteropt::sampling_detail {

std::uint32_t morton_code(Point p) {
    const auto quantize = [](double v) {
        return static_cast<std::uint32_t>(std::clamp(static_cast<int>(v * 65536.0), 0, 65535));
    };
    const auto spread = [](std::uint32_t v) {
        v = (v | (v << 8)) & 0x00FF00FFu;
        v = (v | (v << 4)) & 0x0F0F0F0Fu;
        v = (v | (v << 2)) & 0x33333333u;
        v = (v | (v << 1)) & 0x55555555u;
        return v;
    };
    return spread(quantize(p.x)) | (spread(quantize(p.y)) << 1);
}

namespace {

// Accepted-point grid for one dart-throwing pass. Cell size is at least the
// radius, so conflicts are confined to the 3x3 neighbourhood.
class DartGrid {
public:
    DartGrid(Points points, double radius)
        : points_(points),
          radius2_(radius * radius),
          cells_(std::clamp(radius > 0.0 ? static_cast<int>(1.0 / radius) : 512, 1, 512)),
          head_(static_cast<std::size_t>(cells_) * cells_, -1),
          next_(points.size(), -1) {}

    bool try_accept(std::uint32_t i) {
        const int c = grid_cell(points_[i], cells_);
        const int cx = c % cells_, cy = c / cells_;
        if (radius2_ > 0.0) {
            for (int y = std::max(0, cy - 1); y <= std::min(cells_ - 1, cy + 1); ++y)
                for (int x = std::max(0, cx - 1); x <= std::min(cells_ - 1, cx + 1); ++x)
                    for (int j = head_[y * cells_ + x]; j >= 0; j = next_[j]) {
                        const double dx = points_[j].x - points_[i].x;
                        const double dy = points_[j].y - points_[i].y;
                        if (dx * dx + dy * dy < radius2_) return false;
                    }
        }
        next_[i] = head_[c];
        head_[c] = static_cast<int>(i);
        return true;
    }

private:
    Points points_;
    double radius2_;
    int cells_;
    std::vector<int> head_;
    std::vector<int> next_;
};

Indices throw_darts(Points points, const Indices& order, double radius) {
    DartGrid grid(points, radius);
    Indices accepted;
    for (std::uint32_t i : order)
        if (grid.try_accept(i)) accepted.push_back(i);
    return accepted;
}

}  // namespace

BlueNoiseResult blue_noise(Points points, std::size_t budget, const Indices& order) {
    const double tolerance = 0.02 * static_cast<double>(budget);
    const auto within = [&](std::size_t count) {
        return std::abs(static_cast<double>(count) - static_cast<double>(budget)) <= tolerance;
    };

    // Accepted count is (nearly) non-increasing in the radius: 0 accepts all,
    // sqrt(2) accepts exactly one.
    double lo = 0.0, hi = std::sqrt(2.0) * 1.0001;
    Indices lo_accepted = order;  // radius 0 accepts everything, in dart order
    BlueNoiseResult result;
    bool found = within(order.size());
    if (found) {
        result = {order, 0.0};
    }
    for (int iter = 0; iter < 64 && !found; ++iter) {
        const double mid = 0.5 * (lo + hi);
        auto accepted = throw_darts(points, order, mid);
        if (within(accepted.size())) {
            result = {std::move(accepted), mid};
            found = true;
        } else if (accepted.size() > budget) {
            lo = mid;
            lo_accepted = std::move(accepted);
        } else {
            hi = mid;
        }
    }
    if (!found) {
        // The count jumped over the window; keep the first `budget` darts
        // accepted at the largest radius that still over-fills. A prefix keeps
        // the minimum-distance guarantee.
        lo_accepted.resize(budget);
        result = {std::move(lo_accepted), lo};
    }
    std::sort(result.indices.begin(), result.indices.end());
    return result;
}

std::vector<std::uint32_t> farthest_point_order(std::span<const Point> points, std::size_t budget,
                                                std::size_t start) {
    const std::size_t n = points.size();
    std::vector<double> nearest(n, HUGE_VAL);
    std::vector<std::uint32_t> chosen;
    chosen.reserve(budget);
    std::size_t current = start;
    for (;;) {
        chosen.push_back(static_cast<std::uint32_t>(current));
        nearest[current] = -1.0;  // taken
        if (chosen.size() == budget) break;
        const Point c = points[current];
        std::size_t best = n;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (nearest[i] < 0.0) continue;
            const double dx = points[i].x - c.x;
            const double dy = points[i].y - c.y;
            const double d = std::min(nearest[i], dx * dx + dy * dy);
            nearest[i] = d;
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        current = best;
    }
    return chosen;
}

Indices farthest_point(Points points, std::size_t budget, Rng& rng) {
    auto out = farthest_point_order(points, budget, rng.below(points.size()));
    std::sort(out.begin(), out.end());
    return out;
}

Indices z_order(Points points, std::size_t budget, Rng& rng) {
    // Evenly spaced positions along the Morton curve with a random phase;
    // positions floor((i + phase) * n / budget) are distinct because n >= budget.
    const std::size_t n = points.size();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> curve(n);
    for (std::size_t i = 0; i < n; ++i) curve[i] = {morton_code(points[i]), static_cast<std::uint32_t>(i)};
    std::sort(curve.begin(), curve.end());

    const double phase = rng.uniform();
    const double stride = static_cast<double>(n) / static_cast<double>(budget);
    Indices out;
    out.reserve(budget);
    for (std::size_t i = 0; i < budget; ++i) {
        const auto pos = std::min(n - 1, static_cast<std::size_t>((static_cast<double>(i) + phase) * stride));
        out.push_back(curve[pos].second);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace scatteropt::sampling_detail
