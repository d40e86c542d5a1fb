#include "scatteropt/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "sampling/samplers.hpp"
#include "scatteropt/error.hpp"

namespace scatteropt {

namespace {

struct KindInfo {
    SamplerKind kind;
    std::string_view name;
    unsigned categories;
};

constexpr KindInfo kKinds[] = {
    {SamplerKind::Random, "random", kCategoryRandom},
    {SamplerKind::DensityBiased, "density_biased", kCategoryDensity},
    {SamplerKind::NonUniform, "non_uniform", kCategoryDensity},
    {SamplerKind::SvdBased, "svd", kCategoryDensity},
    {SamplerKind::MultiViewZOrder, "multi_view_z_order", kCategoryDensity},
    {SamplerKind::RecursiveSubdivision, "recursive_subdivision", kCategoryDensity | kCategoryOutlier},
    {SamplerKind::OutlierBiasedDensity, "outlier_biased_density", kCategoryDensity | kCategoryOutlier},
    {SamplerKind::OutlierBiasedRandom, "outlier_biased_random", kCategoryOutlier},
    {SamplerKind::HashmapStratified, "hashmap", kCategoryOutlier},
    {SamplerKind::OutlierBiasedBlueNoise, "outlier_biased_blue_noise", kCategoryOutlier | kCategorySeparation},
    {SamplerKind::BlueNoise, "blue_noise", kCategorySeparation},
    {SamplerKind::MultiClassBlueNoise, "multi_class_blue_noise", kCategorySeparation},
    {SamplerKind::FarthestPoint, "farthest_point", kCategorySeparation},
    {SamplerKind::ZOrder, "z_order", kCategorySeparation},
};

const KindInfo& info(SamplerKind kind) { return kKinds[static_cast<std::size_t>(kind)]; }

}  // namespace

unsigned categories(SamplerKind kind) { return info(kind).categories; }

std::vector<std::string_view> category_names(SamplerKind kind) {
    std::vector<std::string_view> out;
    const unsigned c = categories(kind);
    if (c & kCategoryRandom) out.emplace_back("random");
    if (c & kCategoryDensity) out.emplace_back("density");
    if (c & kCategoryOutlier) out.emplace_back("outlier");
    if (c & kCategorySeparation) out.emplace_back("separation");
    return out;
}

std::string_view to_string(SamplerKind kind) { return info(kind).name; }

std::optional<SamplerKind> parse_sampler(std::string_view name) {
    for (const auto& k : kKinds)
        if (k.name == name) return k.kind;
    return std::nullopt;
}

std::vector<double> default_rates() {
    std::vector<double> rates;
    for (int i = 1; i <= 19; ++i) rates.push_back(i / 20.0);
    return rates;
}

std::size_t sample_budget(std::size_t n, double rate) {
    const auto raw = static_cast<long long>(std::llround(rate * static_cast<double>(n)));
    return static_cast<std::size_t>(std::clamp<long long>(raw, 1, static_cast<long long>(n)));
}

bool is_blue_noise(SamplerKind kind) {
    return kind == SamplerKind::BlueNoise || kind == SamplerKind::MultiClassBlueNoise ||
           kind == SamplerKind::OutlierBiasedBlueNoise;
}

SampledSet sample(const PointSet& set, const SampleSpec& spec) {
    using namespace sampling_detail;
    if (set.empty()) throw InvalidArgument("cannot sample an empty point set");
    if (!(spec.rate > 0.0 && spec.rate <= 1.0)) throw InvalidArgument("sampling rate must lie in (0, 1]");

    const auto started = std::chrono::steady_clock::now();
    const Points points = set.points;
    const std::size_t n = points.size();
    const std::size_t budget = sample_budget(n, spec.rate);
    // One stream per kind so that aliased kinds never share draws.
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(spec.kind) + 1));

    SampledSet out;
    out.parent = set.name;
    out.spec = spec;
    switch (spec.kind) {
        case SamplerKind::Random: out.indices = random_subset(n, budget, rng); break;
        case SamplerKind::DensityBiased: out.indices = density_biased(points, budget, rng); break;
        case SamplerKind::NonUniform: out.indices = non_uniform(points, budget, rng); break;
        case SamplerKind::SvdBased: out.indices = svd_based(points, budget); break;
        case SamplerKind::MultiViewZOrder: out.indices = multi_view_z_order(points, budget, rng); break;
        case SamplerKind::RecursiveSubdivision: out.indices = recursive_subdivision(points, budget, rng); break;
        case SamplerKind::OutlierBiasedDensity: out.indices = outlier_biased_density(points, budget, rng); break;
        case SamplerKind::OutlierBiasedRandom: out.indices = outlier_biased_random(points, budget, rng); break;
        case SamplerKind::HashmapStratified: out.indices = hashmap_stratified(points, budget, rng); break;
        case SamplerKind::BlueNoise:
        case SamplerKind::MultiClassBlueNoise: {
            // Monochrome data has a single class, so the multi-class variant
            // reduces to plain blue noise (on its own stream).
            auto result = blue_noise(points, budget, random_permutation(n, rng));
            out.indices = std::move(result.indices);
            out.radius = result.radius;
            break;
        }
        case SamplerKind::OutlierBiasedBlueNoise: {
            const auto boost = outlier_boost(points);
            auto result = blue_noise(points, budget, weighted_order(boost, rng));
            out.indices = std::move(result.indices);
            out.radius = result.radius;
            break;
        }
        case SamplerKind::FarthestPoint: out.indices = farthest_point(points, budget, rng); break;
        case SamplerKind::ZOrder: out.indices = z_order(points, budget, rng); break;
    }
    out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<TimingRow> time_samplers(const PointSet& set, std::span<const double> rates,
                                     std::span<const SamplerKind> kinds, std::size_t repeats, std::uint64_t seed) {
    if (repeats == 0) throw InvalidArgument("repeats must be >= 1");
    std::vector<TimingRow> rows;
    rows.reserve(kinds.size() * rates.size());
    for (SamplerKind kind : kinds) {
        for (double rate : rates) {
            std::vector<double> times;
            times.reserve(repeats);
            for (std::size_t r = 0; r < repeats; ++r) {
                times.push_back(sample(set, {kind, rate, derive_seed(seed, r)}).elapsed_ms);
            }
            rows.push_back({kind, rate, median(std::move(times)), repeats});
        }
    }
    return rows;
}

void write_timing_csv(std::ostream& out, std::span<const TimingRow> rows) {
    out << "kind,rate,median_ms,reps\n";
    for (const auto& row : rows) {
        out << to_string(row.kind) << ',' << row.rate << ',' << row.median_ms << ',' << row.reps << '\n';
    }
}

}  // namespace scatteropt
