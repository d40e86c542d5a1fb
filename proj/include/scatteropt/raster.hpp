#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scatteropt/dataset.hpp"
#include "scatteropt/field.hpp"
#include "scatteropt/sampling.hpp"

namespace scatteropt {

inline constexpr std::array<double, 4> kDefaultAreas{20.0, 40.0, 60.0, 80.0};
inline constexpr std::array<double, 6> kDefaultOpacities{0.01, 0.05, 0.10, 0.20, 0.40, 0.80};
inline constexpr int kCanvasPx = 700;

struct RenderParams {
    double point_area = 40.0;  ///< mark area in px^2
    double opacity = 0.1;
    int width = kCanvasPx;
    int height = kCanvasPx;
};

/// Number of marks covering each pixel center. Independent of opacity, so a
/// sweep rasterizes once per (sample, area) and composites per opacity.
struct HitBuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> hits;
    std::uint32_t max_hits = 0;
};

/// Accumulated opacity of a monochrome mark over a white background, per pixel.
struct CoverageBuffer {
    int width = 0;
    int height = 0;
    std::vector<double> coverage;

    double at(int x, int y) const { return coverage[static_cast<std::size_t>(y) * width + x]; }
};

double mark_radius(double point_area);

/// Counts, per pixel, the filled circles (centered at (x*width, y*height))
/// whose radius reaches the pixel center. Marks outside the viewport clip.
HitBuffer rasterize(std::span<const Point> points, std::span<const std::uint32_t> indices, double point_area,
                    int width = kCanvasPx, int height = kCanvasPx);

/// coverage = 1 - (1 - opacity)^hits.
CoverageBuffer composite(const HitBuffer& hits, double opacity);

CoverageBuffer render(const PointSet& set, const SampledSet& sample, const RenderParams& params);

/// Mean coverage over each grid cell. Throws InvalidArgument when the buffer
/// dimensions are not multiples of `grid`.
DensityField densify(const CoverageBuffer& buffer, int grid = kDensityGrid);

/// densify(composite(hits, opacity)) without materializing the coverage
/// buffer; bit-identical to the two-step form.
DensityField densify(const HitBuffer& hits, double opacity, int grid = kDensityGrid);

/// Filled / unfilled view of a buffer (coverage > 0 becomes 1).
CoverageBuffer binarize(const CoverageBuffer& buffer);

/// 8-bit grayscale PNG, value = round(coverage * 255), first row = top of
/// the plot (largest y).
std::vector<std::uint8_t> encode_png(const CoverageBuffer& buffer);

}  // namespace scatteropt
