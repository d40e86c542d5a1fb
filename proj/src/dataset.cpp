#include "scatteropt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "scatteropt/error.hpp"
#include "scatteropt/rng.hpp"

namespace scatteropt {

namespace {

// Splits one CSV record. Handles double-quoted fields with "" escapes; does
// not support newlines inside quoted fields.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

std::size_t column_index(const std::vector<std::string>& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return i;
    }
    throw DataError("missing column: " + std::string(name));
}

PointSet parse_stream(std::istream& in, std::string_view x_col, std::string_view y_col, std::string name) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV: no header row");
    if (line.size() >= 3 && std::memcmp(line.data(), "\xEF\xBB\xBF", 3) == 0) line.erase(0, 3);
    const auto header = split_record(line);
    const std::size_t xi = column_index(header, x_col);
    const std::size_t yi = column_index(header, y_col);

    PointSet set;
    set.name = std::move(name);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++set.source_rows;
        const auto fields = split_record(line);
        Point p;
        if (xi >= fields.size() || yi >= fields.size() || !parse_double(fields[xi], p.x) ||
            !parse_double(fields[yi], p.y)) {
            ++set.dropped_rows;
            continue;
        }
        set.points.push_back(p);
    }
    if (set.points.empty()) throw DataError("no parseable rows for columns " + std::string(x_col) + ", " +
                                            std::string(y_col));
    normalize_unit_square(set.points);
    return set;
}

}  // namespace

void normalize_unit_square(std::vector<Point>& points) {
    if (points.empty()) return;
    double min_x = points.front().x, max_x = min_x;
    double min_y = points.front().y, max_y = min_y;
    for (const Point& p : points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double range_x = max_x - min_x;
    const double range_y = max_y - min_y;
    if (!(range_x > 0.0) || !(range_y > 0.0)) {
        std::string axes;
        if (!(range_x > 0.0)) axes = "x";
        if (!(range_y > 0.0)) axes += axes.empty() ? "y" : ", y";
        throw DataError("degenerate axis: " + axes + " (all values equal)");
    }
    for (Point& p : points) {
        // Clamp guards the last ulp; min-max maps endpoints exactly otherwise.
        p.x = std::clamp((p.x - min_x) / range_x, 0.0, 1.0);
        p.y = std::clamp((p.y - min_y) / range_y, 0.0, 1.0);
    }
}

PointSet load_csv(const std::filesystem::path& path, std::string_view x_col, std::string_view y_col,
                  std::string name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    if (name.empty()) name = path.stem().string();
    return parse_stream(in, x_col, y_col, std::move(name));
}

PointSet load_csv(const std::filesystem::path& path, std::span<const std::string> columns, std::string name) {
    if (columns.size() != 2) {
        throw DataError("exactly two columns must be selected (got " + std::to_string(columns.size()) +
                        "); reduce higher-dimensional data to 2D before loading");
    }
    return load_csv(path, columns[0], columns[1], std::move(name));
}

PointSet parse_csv(std::string_view text, std::string_view x_col, std::string_view y_col, std::string name) {
    std::istringstream in{std::string(text)};
    return parse_stream(in, x_col, y_col, std::move(name));
}

PointSet gaussian_mixture(std::size_t n, std::span<const Point> centers, double sigma, std::uint64_t seed,
                          std::string name) {
    if (centers.empty()) throw InvalidArgument("gaussian_mixture needs at least one center");
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    PointSet set;
    set.name = std::move(name);
    set.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& c = centers[i % centers.size()];
        Point p;
        do {
            p = {c.x + normal(rng.engine()), c.y + normal(rng.engine())};
        } while (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0);
        set.points.push_back(p);
    }
    set.source_rows = n;
    return set;
}

std::vector<Point> five_cluster_centers() {
    return {{0.25, 0.25}, {0.75, 0.25}, {0.5, 0.5}, {0.25, 0.75}, {0.75, 0.75}};
}

std::uint64_t fingerprint(const PointSet& set) {
    // FNV-1a over the raw coordinate bytes.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(set.points.data());
    const std::size_t len = set.points.size() * sizeof(Point);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace scatteropt
