#include "scatteropt/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "scatteropt/error.hpp"
#include "scatteropt/parallel.hpp"

namespace scatteropt {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Grid values are compared with a small absolute slack so that 0.15 typed on
// a command line matches 3/20 computed in code.
constexpr double kGridSlack = 1e-9;

std::vector<double> filter_axis(const std::vector<double>& values, const std::optional<Interval>& range,
                                const char* axis) {
    if (!range) return values;
    std::vector<double> kept;
    for (double v : values)
        if (range->contains(v)) kept.push_back(v);
    if (kept.empty()) {
        throw InvalidArgument(std::string("no grid value of ") + axis + " lies in [" + std::to_string(range->min) +
                              ", " + std::to_string(range->max) + "]");
    }
    return kept;
}

RankedDesign finish_design(const DesignParams& params, const DensityField& field, double sample_ms,
                           double render_ms, const std::optional<ClusterRange>& clusters) {
    RankedDesign design;
    design.params = params;
    const auto started = Clock::now();
    const MergeTree tree = build_merge_tree(field);
    design.plot = threshold_plot(tree);
    design.score = saliency(design.plot, clusters);
    design.timings = {sample_ms, render_ms, ms_since(started)};
    return design;
}

}  // namespace

bool Interval::contains(double v) const { return v >= min - kGridSlack && v <= max + kGridSlack; }

void SweepRanges::validate() const {
    const auto check = [](const std::optional<Interval>& r, const char* axis) {
        if (r && !(r->min <= r->max)) throw InvalidArgument(std::string(axis) + " range has min > max");
    };
    check(rate, "sampling rate");
    check(point_area, "point area");
    check(opacity, "opacity");
    if (clusters && clusters->min > clusters->max) throw InvalidArgument("cluster range has min > max");
}

SweepGrid SweepGrid::defaults() {
    return {default_rates(), {kDefaultAreas.begin(), kDefaultAreas.end()},
            {kDefaultOpacities.begin(), kDefaultOpacities.end()}};
}

SweepGrid SweepGrid::restrict(const SweepRanges& ranges) const {
    ranges.validate();
    return {filter_axis(rates, ranges.rate, "sampling rate"), filter_axis(areas, ranges.point_area, "point area"),
            filter_axis(opacities, ranges.opacity, "opacity")};
}

bool ranks_before(const RankedDesign& a, const RankedDesign& b) {
    if (a.score.value != b.score.value) return a.score.value > b.score.value;
    const auto& p = a.params;
    const auto& q = b.params;
    if (p.rate != q.rate) return p.rate < q.rate;
    if (p.point_area != q.point_area) return p.point_area < q.point_area;
    if (p.opacity != q.opacity) return p.opacity < q.opacity;
    if (p.sampler != q.sampler) return p.sampler < q.sampler;
    return p.seed < q.seed;
}

std::shared_ptr<const SampledSet> DesignCache::find(const SampleKey& key) const {
    std::shared_lock lock(mutex_);
    const auto it = samples_.find(key);
    return it == samples_.end() ? nullptr : it->second;
}

std::shared_ptr<const DesignCache::FieldEntry> DesignCache::find(const FieldKey& key) const {
    std::shared_lock lock(mutex_);
    const auto it = fields_.find(key);
    return it == fields_.end() ? nullptr : it->second;
}

std::shared_ptr<const SampledSet> DesignCache::insert(const SampleKey& key, SampledSet value) {
    auto entry = std::make_shared<const SampledSet>(std::move(value));
    std::unique_lock lock(mutex_);
    return samples_.try_emplace(key, std::move(entry)).first->second;
}

std::shared_ptr<const DesignCache::FieldEntry> DesignCache::insert(const FieldKey& key, FieldEntry value) {
    auto entry = std::make_shared<const FieldEntry>(std::move(value));
    std::unique_lock lock(mutex_);
    return fields_.try_emplace(key, std::move(entry)).first->second;
}

std::size_t DesignCache::sample_count() const {
    std::shared_lock lock(mutex_);
    return samples_.size();
}

std::size_t DesignCache::field_count() const {
    std::shared_lock lock(mutex_);
    return fields_.size();
}

std::string dataset_key(const PointSet& set) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fingerprint(set)));
    return set.name + "#" + hex;
}

namespace {

std::shared_ptr<const SampledSet> obtain_sample(const PointSet& set, const DesignCache::SampleKey& key,
                                                DesignCache* cache) {
    if (cache) {
        if (auto hit = cache->find(key)) return hit;
    }
    SampledSet fresh = sample(set, {key.sampler, key.rate, key.seed});
    if (cache) return cache->insert(key, std::move(fresh));
    return std::make_shared<const SampledSet>(std::move(fresh));
}

}  // namespace

RankedDesign evaluate(const PointSet& set, const DesignParams& params, std::optional<ClusterRange> clusters,
                      DesignCache* cache) {
    const DesignCache::SampleKey sample_key{cache ? dataset_key(set) : std::string{}, params.sampler, params.rate,
                                            params.seed};
    const auto sampled = obtain_sample(set, sample_key, cache);
    const DesignCache::FieldKey field_key{sample_key, params.point_area, params.opacity};
    std::shared_ptr<const DesignCache::FieldEntry> entry = cache ? cache->find(field_key) : nullptr;
    if (!entry) {
        const auto started = Clock::now();
        const HitBuffer hits = rasterize(set.points, sampled->indices, params.point_area);
        DesignCache::FieldEntry fresh{densify(hits, params.opacity), 0.0};
        fresh.render_ms = ms_since(started);
        entry = cache ? cache->insert(field_key, std::move(fresh))
                      : std::make_shared<const DesignCache::FieldEntry>(std::move(fresh));
    }
    return finish_design(params, entry->field, sampled->elapsed_ms, entry->render_ms, clusters);
}

SweepResult sweep(const PointSet& set, const SweepOptions& options) {
    if (set.empty()) throw InvalidArgument("cannot sweep an empty point set");
    if (options.top_k == 0) throw InvalidArgument("top_k must be >= 1");
    if (options.samplers.empty()) throw InvalidArgument("at least one sampler is required");
    const SweepGrid grid = options.grid.restrict(options.ranges);
    const auto& clusters = options.ranges.clusters;

    const std::size_t n_samplers = options.samplers.size();
    const std::size_t n_rates = grid.rates.size();
    const std::size_t n_areas = grid.areas.size();
    const std::size_t n_opacities = grid.opacities.size();
    const std::size_t total = n_samplers * grid.size();
    const std::string key = options.cache ? dataset_key(set) : std::string{};

    std::vector<RankedDesign> designs(total);
    std::atomic<std::size_t> done{0};

    // One task per (sampler, rate): the sample is shared by every encoding
    // and each area is rasterized once for all opacities.
    parallel_for(n_samplers * n_rates, options.workers, [&](std::size_t task) {
        const std::size_t s = task / n_rates;
        const std::size_t r = task % n_rates;
        const DesignCache::SampleKey sample_key{key, options.samplers[s], grid.rates[r], options.seed};
        const auto sampled = obtain_sample(set, sample_key, options.cache);

        for (std::size_t a = 0; a < n_areas; ++a) {
            std::optional<HitBuffer> hits;
            double raster_ms = 0.0;
            for (std::size_t o = 0; o < n_opacities; ++o) {
                const DesignParams params{options.samplers[s], grid.rates[r], grid.areas[a], grid.opacities[o],
                                          options.seed};
                const DesignCache::FieldKey field_key{sample_key, params.point_area, params.opacity};
                std::shared_ptr<const DesignCache::FieldEntry> entry =
                    options.cache ? options.cache->find(field_key) : nullptr;
                if (!entry) {
                    if (!hits) {
                        const auto started = Clock::now();
                        hits = rasterize(set.points, sampled->indices, params.point_area);
                        raster_ms = ms_since(started);
                    }
                    const auto started = Clock::now();
                    DesignCache::FieldEntry fresh{densify(*hits, params.opacity), 0.0};
                    fresh.render_ms = raster_ms + ms_since(started);
                    entry = options.cache ? options.cache->insert(field_key, std::move(fresh))
                                          : std::make_shared<const DesignCache::FieldEntry>(std::move(fresh));
                }
                const std::size_t index = ((s * n_rates + r) * n_areas + a) * n_opacities + o;
                designs[index] = finish_design(params, entry->field, sampled->elapsed_ms, entry->render_ms, clusters);
                const std::size_t finished = done.fetch_add(1) + 1;
                if (options.progress) options.progress(finished, total);
            }
        }
    });

    SweepResult result;
    result.evaluated = total;
    const std::size_t keep = std::min(options.top_k, total);
    std::partial_sort(designs.begin(), designs.begin() + static_cast<std::ptrdiff_t>(keep), designs.end(),
                      ranks_before);
    designs.resize(keep);
    result.ranked = std::move(designs);
    return result;
}

}  // namespace scatteropt
