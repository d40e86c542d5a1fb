#pragma once

#include <cstddef>
#include <vector>

namespace scatteropt {

inline constexpr int kDensityGrid = 20;

/// Row-major scalar grid of visual density. Densities produced by `densify`
/// are 20x20 with values in [0, 1]; the topology code accepts any shape.
struct DensityField {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    double cell_px = 0.0;

    DensityField() = default;
    DensityField(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return values.size(); }
};

}  // namespace scatteropt
