#include "scatteropt/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scatteropt/error.hpp"

namespace scatteropt {

namespace {

// coverage[k] for k overlapping marks. k = 1 is stored as the opacity itself
// so a single mark reproduces it exactly.
std::vector<double> coverage_table(std::uint32_t max_hits, double opacity) {
    std::vector<double> table(static_cast<std::size_t>(max_hits) + 1);
    table[0] = 0.0;
    if (max_hits >= 1) table[1] = opacity;
    const double keep = 1.0 - opacity;
    for (std::uint32_t k = 2; k <= max_hits; ++k) table[k] = 1.0 - std::pow(keep, static_cast<double>(k));
    return table;
}

void check_grid(int width, int height, int grid) {
    if (grid <= 0 || width <= 0 || height <= 0 || width % grid != 0 || height % grid != 0) {
        throw InvalidArgument("buffer " + std::to_string(width) + "x" + std::to_string(height) +
                              " is not divisible into a " + std::to_string(grid) + "x" + std::to_string(grid) +
                              " grid");
    }
}

// Shared block-mean reduction; `value(i)` yields the coverage of pixel i.
// Summation order (row-major within each block) is fixed so both densify
// overloads agree bit for bit.
template <typename Value>
DensityField block_means(int width, int height, int grid, Value&& value) {
    check_grid(width, height, grid);
    const int bw = width / grid;
    const int bh = height / grid;
    DensityField field(grid, grid);
    field.cell_px = static_cast<double>(bw);
    const double inv_area = 1.0 / (static_cast<double>(bw) * bh);
    for (int cy = 0; cy < grid; ++cy) {
        for (int cx = 0; cx < grid; ++cx) {
            double sum = 0.0;
            for (int y = cy * bh; y < (cy + 1) * bh; ++y) {
                const std::size_t row = static_cast<std::size_t>(y) * width;
                for (int x = cx * bw; x < (cx + 1) * bw; ++x) sum += value(row + x);
            }
            field.at(cx, cy) = sum * inv_area;
        }
    }
    return field;
}

}  // namespace

double mark_radius(double point_area) { return std::sqrt(point_area / std::numbers::pi); }

HitBuffer rasterize(std::span<const Point> points, std::span<const std::uint32_t> indices, double point_area,
                    int width, int height) {
    HitBuffer buf;
    buf.width = width;
    buf.height = height;
    buf.hits.assign(static_cast<std::size_t>(width) * height, 0);
    const double r = mark_radius(point_area);
    const double r2 = r * r;
    for (std::uint32_t idx : indices) {
        const double cx = points[idx].x * width;
        const double cy = points[idx].y * height;
        // Pixels whose center (p + 0.5) can fall inside the disk.
        const int x0 = std::max(0, static_cast<int>(std::ceil(cx - r - 0.5)));
        const int x1 = std::min(width - 1, static_cast<int>(std::floor(cx + r - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(cy - r - 0.5)));
        const int y1 = std::min(height - 1, static_cast<int>(std::floor(cy + r - 0.5)));
        for (int y = y0; y <= y1; ++y) {
            const double dy = y + 0.5 - cy;
            const double dy2 = dy * dy;
            std::uint32_t* row = buf.hits.data() + static_cast<std::size_t>(y) * width;
            for (int x = x0; x <= x1; ++x) {
                const double dx = x + 0.5 - cx;
                if (dx * dx + dy2 <= r2) ++row[x];
            }
        }
    }
    buf.max_hits = buf.hits.empty() ? 0 : *std::max_element(buf.hits.begin(), buf.hits.end());
    return buf;
}

CoverageBuffer composite(const HitBuffer& hits, double opacity) {
    const auto table = coverage_table(hits.max_hits, opacity);
    CoverageBuffer out;
    out.width = hits.width;
    out.height = hits.height;
    out.coverage.resize(hits.hits.size());
    for (std::size_t i = 0; i < hits.hits.size(); ++i) out.coverage[i] = table[hits.hits[i]];
    return out;
}

CoverageBuffer render(const PointSet& set, const SampledSet& sample, const RenderParams& params) {
    return composite(rasterize(set.points, sample.indices, params.point_area, params.width, params.height),
                     params.opacity);
}

DensityField densify(const CoverageBuffer& buffer, int grid) {
    return block_means(buffer.width, buffer.height, grid, [&](std::size_t i) { return buffer.coverage[i]; });
}

DensityField densify(const HitBuffer& hits, double opacity, int grid) {
    check_grid(hits.width, hits.height, grid);
    const auto table = coverage_table(hits.max_hits, opacity);
    return block_means(hits.width, hits.height, grid, [&](std::size_t i) { return table[hits.hits[i]]; });
}

CoverageBuffer binarize(const CoverageBuffer& buffer) {
    CoverageBuffer out = buffer;
    for (double& c : out.coverage) c = c > 0.0 ? 1.0 : 0.0;
    return out;
}

}  // namespace scatteropt
