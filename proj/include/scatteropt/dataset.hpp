#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scatteropt {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// 2D points normalized to the unit square. Immutable once loaded; share via
/// shared_ptr<const PointSet> across workers.
struct PointSet {
    std::string name;
    std::vector<Point> points;
    std::size_t source_rows = 0;   ///< data rows read before filtering
    std::size_t dropped_rows = 0;  ///< rows skipped for non-finite / unparseable values

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// Loads two numeric columns from a CSV file with a header row and min-max
/// normalizes each axis into [0, 1]. Throws DataError on a missing file or
/// column, when no row parses, or when an axis has zero range.
PointSet load_csv(const std::filesystem::path& path, std::string_view x_col, std::string_view y_col,
                  std::string name = {});

/// Same, with the column selection given as a list. Exactly two columns are
/// accepted; higher-dimensional data must be projected to 2D beforehand.
PointSet load_csv(const std::filesystem::path& path, std::span<const std::string> columns, std::string name = {});

/// Parses CSV text already in memory (used for HTTP uploads).
PointSet parse_csv(std::string_view text, std::string_view x_col, std::string_view y_col, std::string name);

/// Per-axis min-max normalization in place. Throws DataError naming the
/// degenerate axis (or axes) when a range is zero.
void normalize_unit_square(std::vector<Point>& points);

/// Samples a Gaussian mixture restricted to the unit square (out-of-square
/// draws are redrawn). Points are assigned to centers round-robin.
PointSet gaussian_mixture(std::size_t n, std::span<const Point> centers, double sigma, std::uint64_t seed,
                          std::string name = "gaussian-mixture");

/// Five well-separated clusters at the corners and center of a square.
std::vector<Point> five_cluster_centers();

/// Content hash of the coordinates; used to key caches.
std::uint64_t fingerprint(const PointSet& set);

}  // namespace scatteropt
