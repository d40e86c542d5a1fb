#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scatteropt/dataset.hpp"

namespace scatteropt {

enum class SamplerKind : std::uint8_t {
    Random,
    DensityBiased,
    NonUniform,
    SvdBased,
    MultiViewZOrder,
    RecursiveSubdivision,
    OutlierBiasedDensity,
    OutlierBiasedRandom,
    HashmapStratified,
    OutlierBiasedBlueNoise,
    BlueNoise,
    MultiClassBlueNoise,
    FarthestPoint,
    ZOrder,
};

inline constexpr std::array<SamplerKind, 14> kAllSamplers{
    SamplerKind::Random,
    SamplerKind::DensityBiased,
    SamplerKind::NonUniform,
    SamplerKind::SvdBased,
    SamplerKind::MultiViewZOrder,
    SamplerKind::RecursiveSubdivision,
    SamplerKind::OutlierBiasedDensity,
    SamplerKind::OutlierBiasedRandom,
    SamplerKind::HashmapStratified,
    SamplerKind::OutlierBiasedBlueNoise,
    SamplerKind::BlueNoise,
    SamplerKind::MultiClassBlueNoise,
    SamplerKind::FarthestPoint,
    SamplerKind::ZOrder,
};

/// Preservation categories, combinable as a bit set.
enum Category : unsigned {
    kCategoryRandom = 1u << 0,
    kCategoryDensity = 1u << 1,
    kCategoryOutlier = 1u << 2,
    kCategorySeparation = 1u << 3,
};

unsigned categories(SamplerKind kind);
std::vector<std::string_view> category_names(SamplerKind kind);

std::string_view to_string(SamplerKind kind);
std::optional<SamplerKind> parse_sampler(std::string_view name);

/// Default sampling-rate grid: 5% .. 95% in 5% steps.
std::vector<double> default_rates();

struct SampleSpec {
    SamplerKind kind = SamplerKind::Random;
    double rate = 0.1;
    std::uint64_t seed = 0;
};

struct SampledSet {
    std::vector<std::uint32_t> indices;  ///< sorted, unique, each < parent size
    std::string parent;
    SampleSpec spec;
    double elapsed_ms = 0.0;
    double radius = 0.0;  ///< accepted Poisson-disk radius (blue-noise kinds only)
};

/// clamp(round(rate * n), 1, n).
std::size_t sample_budget(std::size_t n, double rate);

/// Selects a subset of `set` according to `spec`. The output is a pure
/// function of (set, spec). Throws InvalidArgument for an empty set or a
/// rate outside (0, 1].
SampledSet sample(const PointSet& set, const SampleSpec& spec);

/// True for the kinds whose count may deviate from the budget by up to 2%.
bool is_blue_noise(SamplerKind kind);

struct TimingRow {
    SamplerKind kind = SamplerKind::Random;
    double rate = 0.0;
    double median_ms = 0.0;
    std::size_t reps = 0;
};

/// Median wall time per (kind, rate). Kinds run sequentially.
std::vector<TimingRow> time_samplers(const PointSet& set, std::span<const double> rates,
                                     std::span<const SamplerKind> kinds, std::size_t repeats,
                                     std::uint64_t seed = 0);

/// CSV with header `kind,rate,median_ms,reps`.
void write_timing_csv(std::ostream& out, std::span<const TimingRow> rows);

double median(std::vector<double> values);

namespace sampling_detail {

/// Greedy max-min selection seeded at `start`; exposed for oracle tests.
std::vector<std::uint32_t> farthest_point_order(std::span<const Point> points, std::size_t budget,
                                                std::size_t start);

/// Distance from each point to its k-th nearest neighbour (k clamped to n-1).
std::vector<double> kth_neighbor_distance(std::span<const Point> points, std::size_t k);

/// 16-bit-per-axis Morton code of a unit-square point.
std::uint32_t morton_code(Point p);

}  // namespace sampling_detail

}  // namespace scatteropt
