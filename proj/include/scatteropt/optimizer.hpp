#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "scatteropt/dataset.hpp"
#include "scatteropt/field.hpp"
#include "scatteropt/raster.hpp"
#include "scatteropt/sampling.hpp"
#include "scatteropt/topology.hpp"

namespace scatteropt {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr std::size_t kDefaultTopK = 3;

struct DesignParams {
    SamplerKind sampler = SamplerKind::Random;
    double rate = 0.1;
    double point_area = 40.0;
    double opacity = 0.1;
    std::uint64_t seed = kDefaultSeed;

    friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

struct Interval {
    double min = 0.0;
    double max = 0.0;

    bool contains(double v) const;
};

/// User limits on each design axis; each selects a subset of the grid.
struct SweepRanges {
    std::optional<Interval> rate;
    std::optional<Interval> point_area;
    std::optional<Interval> opacity;
    std::optional<ClusterRange> clusters;

    /// Throws InvalidArgument when min > max on any axis.
    void validate() const;
};

/// Candidate values per axis.
struct SweepGrid {
    std::vector<double> rates;
    std::vector<double> areas;
    std::vector<double> opacities;

    static SweepGrid defaults();

    /// Grid values inside `ranges`. Throws InvalidArgument when an axis
    /// becomes empty.
    SweepGrid restrict(const SweepRanges& ranges) const;

    std::size_t size() const { return rates.size() * areas.size() * opacities.size(); }
};

struct StageTimings {
    double sample_ms = 0.0;
    double render_ms = 0.0;
    double topo_ms = 0.0;
};

struct RankedDesign {
    DesignParams params;
    SaliencyScore score;
    ThresholdPlot plot;
    StageTimings timings;
};

/// Ranking order: saliency descending, then smaller rate, area, opacity,
/// then sampler enumeration order.
bool ranks_before(const RankedDesign& a, const RankedDesign& b);

/// Thread-safe memo of sampled sets and density fields, keyed by dataset and
/// the design parameters that determine each stage.
class DesignCache {
public:
    struct SampleKey {
        std::string dataset;
        SamplerKind sampler;
        double rate;
        std::uint64_t seed;
        auto operator<=>(const SampleKey&) const = default;
    };
    struct FieldKey {
        SampleKey sample;
        double point_area;
        double opacity;
        auto operator<=>(const FieldKey&) const = default;
    };
    struct FieldEntry {
        DensityField field;
        double render_ms = 0.0;
    };

    std::shared_ptr<const SampledSet> find(const SampleKey& key) const;
    std::shared_ptr<const FieldEntry> find(const FieldKey& key) const;

    /// Inserts unless present; returns the stored entry either way.
    std::shared_ptr<const SampledSet> insert(const SampleKey& key, SampledSet value);
    std::shared_ptr<const FieldEntry> insert(const FieldKey& key, FieldEntry value);

    std::size_t sample_count() const;
    std::size_t field_count() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<SampleKey, std::shared_ptr<const SampledSet>> samples_;
    std::map<FieldKey, std::shared_ptr<const FieldEntry>> fields_;
};

/// Cache key for a dataset: its name plus a content fingerprint.
std::string dataset_key(const PointSet& set);

/// sample -> render -> densify -> merge tree -> threshold plot -> saliency.
RankedDesign evaluate(const PointSet& set, const DesignParams& params,
                      std::optional<ClusterRange> clusters = {}, DesignCache* cache = nullptr);

struct SweepOptions {
    SweepGrid grid = SweepGrid::defaults();
    SweepRanges ranges;
    std::vector<SamplerKind> samplers{kAllSamplers.begin(), kAllSamplers.end()};
    std::size_t top_k = kDefaultTopK;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 0;  ///< 0 = hardware concurrency
    DesignCache* cache = nullptr;
    /// Called after each design with (evaluated, total), from worker threads.
    std::function<void(std::size_t, std::size_t)> progress;
};

struct SweepResult {
    std::vector<RankedDesign> ranked;  ///< top_k designs, best first
    std::size_t evaluated = 0;
};

/// Evaluates every grid combination inside the ranges for every sampler.
/// The result does not depend on the worker count.
SweepResult sweep(const PointSet& set, const SweepOptions& options);

}  // namespace scatteropt
