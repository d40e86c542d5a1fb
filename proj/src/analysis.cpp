#include "scatteropt/analysis.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "scatteropt/error.hpp"
#include "scatteropt/parallel.hpp"
#include "scatteropt/rng.hpp"

namespace scatteropt {

std::vector<QualityRow> quality_rank(const PointSet& set, std::span<const double> rates,
                                     std::span<const SamplerKind> samplers, std::size_t repeats,
                                     const QualityOptions& options) {
    if (set.empty()) throw InvalidArgument("cannot rank samplers on an empty point set");
    if (samplers.empty() || rates.empty() || repeats == 0)
        throw InvalidArgument("quality ranking needs samplers, rates and at least one repeat");
    if (options.areas.empty() || options.opacities.empty())
        throw InvalidArgument("quality ranking needs at least one area and opacity");

    const std::size_t n_s = samplers.size();
    const std::size_t n_r = rates.size();
    const std::size_t cells = options.areas.size() * options.opacities.size();

    // scores[(rate, repeat, sampler)][cell]
    std::vector<std::vector<double>> scores(n_r * repeats * n_s);
    std::vector<double> sample_ms(scores.size(), 0.0);

    parallel_for(scores.size(), options.workers, [&](std::size_t task) {
        const std::size_t s = task % n_s;
        const std::size_t rep = (task / n_s) % repeats;
        const std::size_t r = task / (n_s * repeats);
        const SampledSet sampled = sample(set, {samplers[s], rates[r], derive_seed(options.seed, rep)});
        sample_ms[task] = sampled.elapsed_ms;
        auto& out = scores[task];
        out.reserve(cells);
        for (double area : options.areas) {
            const HitBuffer hits = rasterize(set.points, sampled.indices, area);
            for (double opacity : options.opacities) {
                const DensityField field = densify(hits, opacity);
                out.push_back(saliency(threshold_plot(build_merge_tree(field)), options.clusters).value);
            }
        }
    });

    std::vector<QualityRow> rows;
    rows.reserve(n_r * n_s);
    for (std::size_t r = 0; r < n_r; ++r) {
        std::vector<std::size_t> wins(n_s, 0);
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            const std::size_t base = (r * repeats + rep) * n_s;
            for (std::size_t c = 0; c < cells; ++c) {
                std::size_t winner = 0;
                for (std::size_t s = 1; s < n_s; ++s)
                    if (scores[base + s][c] > scores[base + winner][c]) winner = s;
                ++wins[winner];
            }
        }
        for (std::size_t s = 0; s < n_s; ++s) {
            std::vector<double> times;
            for (std::size_t rep = 0; rep < repeats; ++rep) times.push_back(sample_ms[(r * repeats + rep) * n_s + s]);
            rows.push_back({samplers[s], rates[r],
                            static_cast<double>(wins[s]) / static_cast<double>(cells * repeats), median(times),
                            repeats});
        }
    }
    return rows;
}

std::vector<ScalingRow> scaling_curve(std::span<const std::size_t> sizes, const DesignParams& params,
                                      std::size_t repeats) {
    if (repeats == 0) throw InvalidArgument("scaling curve needs at least one repeat");
    const auto centers = five_cluster_centers();
    std::vector<ScalingRow> rows;
    for (std::size_t n : sizes) {
        const PointSet set = gaussian_mixture(n, centers, 0.03, derive_seed(params.seed, n), "scaling");
        const SampledSet sampled = sample(set, {params.sampler, params.rate, params.seed});
        std::vector<double> times;
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            const auto started = std::chrono::steady_clock::now();
            const HitBuffer hits = rasterize(set.points, sampled.indices, params.point_area);
            const DensityField field = densify(hits, params.opacity);
            const SaliencyScore score = saliency(threshold_plot(build_merge_tree(field)));
            times.push_back(
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count());
            if (score.value < 0.0) throw Error("negative saliency");  // keeps the pipeline from being elided
        }
        rows.push_back({n, median(std::move(times)), repeats});
    }
    return rows;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("line fit needs two or more (x, y) pairs");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("line fit needs at least two distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += e * e;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

void write_quality_csv(std::ostream& out, std::span<const QualityRow> rows) {
    out << "kind,rate,win_fraction,median_ms,reps\n";
    for (const auto& row : rows)
        out << to_string(row.kind) << ',' << row.rate << ',' << row.win_fraction << ',' << row.median_ms << ','
            << row.reps << '\n';
}

void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows) {
    out << "n,render_topo_ms,reps\n";
    for (const auto& row : rows) out << row.n << ',' << row.median_ms << ',' << row.reps << '\n';
}

}  // namespace scatteropt
