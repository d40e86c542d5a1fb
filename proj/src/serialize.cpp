#include "scatteropt/serialize.hpp"

#include <cmath>

#include "scatteropt/error.hpp"

namespace scatteropt {

json to_json(const ThresholdPlot& plot) {
    json bars = json::array();
    for (const Bar& bar : plot.bars)
        bars.push_back({{"count", bar.count}, {"t_min", bar.t_min}, {"t_max", bar.t_max}, {"saliency", bar.saliency}});
    return {{"bars", std::move(bars)}, {"domain_max", plot.domain_max}, {"auc", auc(plot)}};
}

ThresholdPlot plot_from_json(const json& j) {
    try {
        ThresholdPlot plot;
        for (const auto& b : j.at("bars"))
            plot.bars.push_back({b.at("count").get<std::size_t>(), b.at("t_min").get<double>(),
                                 b.at("t_max").get<double>(), b.at("saliency").get<double>()});
        plot.domain_max = j.at("domain_max").get<double>();
        return plot;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed threshold plot: ") + e.what());
    }
}

json to_json(const SaliencyScore& score) { return {{"value", score.value}, {"count", score.count}}; }

json to_json(const DesignParams& params) {
    return {{"sampler", to_string(params.sampler)},
            {"rate", params.rate},
            {"point_area", params.point_area},
            {"opacity", params.opacity},
            {"seed", params.seed}};
}

DesignParams params_from_json(const json& j) {
    try {
        DesignParams params;
        const auto name = j.at("sampler").get<std::string>();
        const auto kind = parse_sampler(name);
        if (!kind) throw InvalidArgument("unknown sampler: " + name);
        params.sampler = *kind;
        params.rate = j.at("rate").get<double>();
        params.point_area = j.at("point_area").get<double>();
        params.opacity = j.at("opacity").get<double>();
        params.seed = j.value("seed", kDefaultSeed);
        return params;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed design parameters: ") + e.what());
    }
}

json to_json(const RankedDesign& design, bool with_timings) {
    json j{{"params", to_json(design.params)}, {"score", to_json(design.score)}, {"plot", to_json(design.plot)}};
    if (with_timings) {
        j["timings"] = {{"sample_ms", design.timings.sample_ms},
                        {"render_ms", design.timings.render_ms},
                        {"topo_ms", design.timings.topo_ms}};
    }
    return j;
}

RankedDesign design_from_json(const json& j, std::optional<ClusterRange> clusters) {
    try {
        RankedDesign design;
        design.params = params_from_json(j.at("params"));
        design.score.value = j.at("score").at("value").get<double>();
        design.score.count = j.at("score").at("count").get<std::size_t>();
        design.score.range = clusters;
        design.plot = plot_from_json(j.at("plot"));
        if (j.contains("timings")) {
            const json& t = j.at("timings");
            design.timings = {t.at("sample_ms").get<double>(), t.at("render_ms").get<double>(),
                              t.at("topo_ms").get<double>()};
        }
        return design;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed design: ") + e.what());
    }
}

json to_json(std::span<const RankedDesign> designs, bool with_timings) {
    json out = json::array();
    for (std::size_t i = 0; i < designs.size(); ++i) {
        json j = to_json(designs[i], with_timings);
        j["rank"] = i + 1;
        out.push_back(std::move(j));
    }
    return out;
}

json to_json(const SweepRanges& ranges) {
    json j = json::object();
    const auto put = [&](const char* key, const std::optional<Interval>& r) {
        if (r) j[key] = {r->min, r->max};
    };
    put("sr", ranges.rate);
    put("ps", ranges.point_area);
    put("op", ranges.opacity);
    if (ranges.clusters) j["clusters"] = {ranges.clusters->min, ranges.clusters->max};
    return j;
}

namespace {

std::pair<double, double> read_pair(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw InvalidArgument(std::string(key) + " must be a [min, max] pair of numbers");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

SweepRanges ranges_from_json(const json& j) {
    if (j.is_null()) return {};
    if (!j.is_object()) throw InvalidArgument("ranges must be an object");
    SweepRanges ranges;
    for (const auto& [key, value] : j.items()) {
        if (key != "sr" && key != "ps" && key != "op" && key != "clusters")
            throw InvalidArgument("unknown range key: " + key);
    }
    const auto interval = [&](const char* key) -> std::optional<Interval> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        const auto [lo, hi] = read_pair(j, key);
        return Interval{lo, hi};
    };
    ranges.rate = interval("sr");
    ranges.point_area = interval("ps");
    ranges.opacity = interval("op");
    if (j.contains("clusters") && !j.at("clusters").is_null()) {
        const auto [lo, hi] = read_pair(j, "clusters");
        if (lo < 1 || hi < 1 || lo != std::floor(lo) || hi != std::floor(hi))
            throw InvalidArgument("clusters must be positive integers");
        ranges.clusters = ClusterRange{static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
    }
    ranges.validate();
    return ranges;
}

}  // namespace scatteropt
