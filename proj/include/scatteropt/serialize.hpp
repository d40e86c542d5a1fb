#pragma once

#include <json.hpp>
#include <span>

#include "scatteropt/optimizer.hpp"
#include "scatteropt/topology.hpp"

namespace scatteropt {

using json = nlohmann::json;

/// `{bars:[{count,t_min,t_max,saliency}], domain_max, auc}`
json to_json(const ThresholdPlot& plot);
ThresholdPlot plot_from_json(const json& j);

json to_json(const SaliencyScore& score);
json to_json(const DesignParams& params);
DesignParams params_from_json(const json& j);

json to_json(const RankedDesign& design, bool with_timings);
/// Inverse of to_json(RankedDesign); `clusters` restores the score's range.
RankedDesign design_from_json(const json& j, std::optional<ClusterRange> clusters = {});

/// Ranked array of `{params, score, plot[, timings]}`.
json to_json(std::span<const RankedDesign> designs, bool with_timings);

json to_json(const SweepRanges& ranges);
/// Accepts `{sr:[min,max], ps:[min,max], op:[min,max], clusters:[min,max]}`,
/// every key optional. Throws InvalidArgument on malformed input.
SweepRanges ranges_from_json(const json& j);

}  // namespace scatteropt
