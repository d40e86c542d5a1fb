#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "scatteropt/dataset.hpp"
#include "scatteropt/optimizer.hpp"
#include "scatteropt/sampling.hpp"

namespace scatteropt {

struct QualityRow {
    SamplerKind kind = SamplerKind::Random;
    double rate = 0.0;
    double win_fraction = 0.0;
    double median_ms = 0.0;  ///< median sampling time over repeats
    std::size_t reps = 0;
};

struct QualityOptions {
    std::vector<double> areas{kDefaultAreas.begin(), kDefaultAreas.end()};
    std::vector<double> opacities{kDefaultOpacities.begin(), kDefaultOpacities.end()};
    std::optional<ClusterRange> clusters;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 0;
};

/// For each rate, counts how often each sampler attains the best saliency
/// over all (area, opacity, repeat) cells. Ties go to the sampler listed first.
std::vector<QualityRow> quality_rank(const PointSet& set, std::span<const double> rates,
                                     std::span<const SamplerKind> samplers, std::size_t repeats,
                                     const QualityOptions& options = {});

struct ScalingRow {
    std::size_t n = 0;
    double median_ms = 0.0;  ///< render + densify + topology, sampling excluded
    std::size_t reps = 0;
};

/// Times the render and topology stages of one design on synthetic
/// five-cluster data of each size.
std::vector<ScalingRow> scaling_curve(std::span<const std::size_t> sizes, const DesignParams& params,
                                      std::size_t repeats = 3);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of y on x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// `kind,rate,win_fraction,median_ms,reps`
void write_quality_csv(std::ostream& out, std::span<const QualityRow> rows);
/// `n,render_topo_ms,reps`
void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows);

}  // namespace scatteropt
