#include "scatteropt/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <variant>

#include "httplib.h"
#include "scatteropt/error.hpp"
#include "scatteropt/raster.hpp"

namespace scatteropt {

namespace {

constexpr std::size_t kMaxUpload = 512u << 20;

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
}

// Request parameter that is either absent or must parse completely.
std::optional<double> number_param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    const std::string text = req.get_param_value(key);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value))
        throw InvalidArgument(std::string("parameter ") + key + " is not a number: " + text);
    return value;
}

double required_number(const httplib::Request& req, const char* key) {
    const auto v = number_param(req, key);
    if (!v) throw InvalidArgument(std::string("missing parameter: ") + key);
    return *v;
}

bool on_grid(double v, std::span<const double> grid) {
    return std::any_of(grid.begin(), grid.end(), [&](double g) { return std::abs(g - v) <= 1e-9; });
}

// Snaps a requested value to the exact grid value so that /render and /plots
// see the same doubles the sweep used.
double snap(double v, std::span<const double> grid) {
    for (double g : grid)
        if (std::abs(g - v) <= 1e-9) return g;
    return v;
}

struct DesignRequest {
    std::shared_ptr<const PointSet> set;
    DesignParams params;
};

// Parses `dataset, sampler, rate, point_area, opacity[, seed]`. Returns the
// HTTP status to send on failure.
std::variant<DesignRequest, std::pair<int, std::string>> parse_design(const httplib::Request& req,
                                                                     const Registry& registry) {
    try {
        if (!req.has_param("dataset")) return std::pair{400, std::string("missing parameter: dataset")};
        if (!req.has_param("sampler")) return std::pair{400, std::string("missing parameter: sampler")};
        DesignRequest out;
        const std::string sampler = req.get_param_value("sampler");
        const auto kind = parse_sampler(sampler);
        if (!kind) return std::pair{404, "unknown sampler: " + sampler};
        out.params.sampler = *kind;
        const auto rates = default_rates();
        const double rate = required_number(req, "rate");
        const double area = required_number(req, "point_area");
        const double opacity = required_number(req, "opacity");
        if (!on_grid(rate, rates) || !on_grid(area, kDefaultAreas) || !on_grid(opacity, kDefaultOpacities))
            return std::pair{404, std::string("design parameters are not on the sweep grid")};
        out.params.rate = snap(rate, rates);
        out.params.point_area = snap(area, kDefaultAreas);
        out.params.opacity = snap(opacity, kDefaultOpacities);
        if (req.has_param("seed")) {
            const std::string text = req.get_param_value("seed");
            std::uint64_t seed = 0;
            const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
            if (ec != std::errc{} || end != text.data() + text.size())
                return std::pair{400, "parameter seed is not an unsigned integer: " + text};
            out.params.seed = seed;
        }
        out.set = registry.get(req.get_param_value("dataset"));
        return out;
    } catch (const NotFoundError& e) {
        return std::pair{404, std::string(e.what())};
    } catch (const InvalidArgument& e) {
        return std::pair{400, std::string(e.what())};
    }
}

JobRequest parse_job_request(const json& body) {
    if (!body.is_object()) throw InvalidArgument("request body must be a JSON object");
    if (!body.contains("dataset_id") || !body["dataset_id"].is_string())
        throw InvalidArgument("dataset_id (string) is required");
    JobRequest request;
    request.dataset_id = body["dataset_id"].get<std::string>();
    if (body.contains("ranges")) request.ranges = ranges_from_json(body["ranges"]);
    if (body.contains("samplers") && !body["samplers"].is_null()) {
        const json& list = body["samplers"];
        if (!list.is_array()) throw InvalidArgument("samplers must be an array of names");
        request.samplers.clear();
        for (const auto& name : list) {
            if (!name.is_string()) throw InvalidArgument("samplers must be an array of names");
            const auto kind = parse_sampler(name.get<std::string>());
            if (!kind) throw InvalidArgument("unknown sampler: " + name.get<std::string>());
            request.samplers.push_back(*kind);
        }
    }
    if (body.contains("top_k") && !body["top_k"].is_null()) {
        if (!body["top_k"].is_number_unsigned() || body["top_k"].get<std::size_t>() == 0)
            throw InvalidArgument("top_k must be a positive integer");
        request.top_k = body["top_k"].get<std::size_t>();
    }
    if (body.contains("seed") && !body["seed"].is_null()) {
        if (!body["seed"].is_number_unsigned()) throw InvalidArgument("seed must be an unsigned integer");
        request.seed = body["seed"].get<std::uint64_t>();
    }
    return request;
}

json dataset_json(const DatasetInfo& info) {
    return {{"id", info.id},
            {"name", info.name},
            {"points", info.points},
            {"source_rows", info.source_rows},
            {"dropped_rows", info.dropped_rows}};
}

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>scatteropt</title></head>
<body>
<h1>scatteropt</h1>
<p>The web UI bundle is not installed. The JSON API is available:</p>
<ul>
<li><a href="/capabilities">/capabilities</a></li>
<li><a href="/datasets">/datasets</a></li>
<li><a href="/jobs">/jobs</a></li>
<li><a href="/openapi.json">/openapi.json</a></li>
</ul>
</body></html>
)";

}  // namespace

json capabilities() {
    json samplers = json::array();
    for (SamplerKind kind : kAllSamplers) {
        json cats = json::array();
        for (auto name : category_names(kind)) cats.push_back(name);
        samplers.push_back({{"name", to_string(kind)}, {"categories", std::move(cats)}});
    }
    return {{"samplers", std::move(samplers)},
            {"rates", default_rates()},
            {"point_areas", kDefaultAreas},
            {"opacities", kDefaultOpacities},
            {"canvas_px", kCanvasPx},
            {"density_grid", kDensityGrid},
            {"defaults", {{"top_k", kDefaultTopK}, {"seed", kDefaultSeed}}}};
}

json openapi_document() {
    const json error_ref = {{"$ref", "#/components/schemas/Error"}};
    const auto json_body = [](json schema) { return json{{"application/json", {{"schema", std::move(schema)}}}}; };
    const auto reply = [&](const char* text, json schema) {
        return json{{"description", text}, {"content", json_body(std::move(schema))}};
    };
    const auto error_reply = [&](const char* text) { return reply(text, error_ref); };
    const auto query = [](const char* name, const char* type, bool required) {
        return json{{"name", name}, {"in", "query"}, {"required", required}, {"schema", {{"type", type}}}};
    };
    const json design_query = json::array({query("dataset", "string", true), query("sampler", "string", true),
                                           query("rate", "number", true), query("point_area", "number", true),
                                           query("opacity", "number", true), query("seed", "integer", false)});
    const json id_param = json::array(
        {{{"name", "id"}, {"in", "path"}, {"required", true}, {"schema", {{"type", "string"}}}}});
    const json pair = {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 2}, {"maxItems", 2}};

    json paths;
    paths["/capabilities"]["get"] = {{"summary", "Sweep grids, sampler names and defaults"},
                                     {"responses", {{"200", reply("Capabilities", {{"type", "object"}})}}}};
    paths["/datasets"]["get"] = {
        {"summary", "List registered datasets"},
        {"responses",
         {{"200", reply("Datasets", {{"type", "array"}, {"items", {{"$ref", "#/components/schemas/Dataset"}}}})}}}};
    paths["/datasets"]["post"] = {
        {"summary", "Upload a CSV and register two of its columns"},
        {"requestBody",
         {{"content",
           {{"multipart/form-data",
             {{"schema",
               {{"type", "object"},
                {"required", {"file", "x_col", "y_col"}},
                {"properties",
                 {{"file", {{"type", "string"}, {"format", "binary"}}},
                  {"x_col", {{"type", "string"}}},
                  {"y_col", {{"type", "string"}}},
                  {"name", {{"type", "string"}}}}}}}}}}}}},
        {"responses",
         {{"201", reply("Registered", {{"type", "object"}, {"properties", {{"dataset_id", {{"type", "string"}}}}}})},
          {"400", error_reply("Unreadable CSV or missing column")},
          {"409", error_reply("Dataset name already registered")}}}};
    paths["/jobs"]["get"] = {
        {"summary", "List jobs"},
        {"responses",
         {{"200", reply("Jobs", {{"type", "array"}, {"items", {{"$ref", "#/components/schemas/Job"}}}})}}}};
    paths["/jobs"]["post"] = {
        {"summary", "Queue an exhaustive design sweep"},
        {"requestBody", {{"content", json_body({{"$ref", "#/components/schemas/JobRequest"}})}}},
        {"responses",
         {{"202", reply("Queued", {{"type", "object"}, {"properties", {{"job_id", {{"type", "string"}}}}}})},
          {"400", error_reply("Malformed body")},
          {"404", error_reply("Unknown dataset")},
          {"422", error_reply("Invalid ranges, samplers or top_k")}}}};
    paths["/jobs/{id}"]["get"] = {{"summary", "Job state and progress"},
                                  {"parameters", id_param},
                                  {"responses",
                                   {{"200", reply("Job", {{"$ref", "#/components/schemas/Job"}})},
                                    {"404", error_reply("Unknown job")}}}};
    paths["/jobs/{id}/results"]["get"] = {
        {"summary", "Ranked designs of a finished job, best first"},
        {"parameters", json::array({id_param[0], query("timings", "integer", false)})},
        {"responses",
         {{"200",
           reply("Ranked designs", {{"type", "array"}, {"items", {{"$ref", "#/components/schemas/RankedDesign"}}}})},
          {"404", error_reply("Unknown job")},
          {"409", error_reply("Job has not finished successfully")}}}};
    paths["/render"]["get"] = {
        {"summary", "Rasterized scatterplot of one design as an 8-bit grayscale PNG"},
        {"parameters", design_query},
        {"responses",
         {{"200", {{"description", "PNG image"}, {"content", {{"image/png", {{"schema", {{"type", "string"}, {"format", "binary"}}}}}}}}},
          {"400", error_reply("Malformed parameters")},
          {"404", error_reply("Unknown dataset or parameters off the sweep grid")}}}};
    paths["/plots"]["get"] = {
        {"summary", "Threshold plot of one design"},
        {"parameters", design_query},
        {"responses",
         {{"200", reply("Threshold plot", {{"$ref", "#/components/schemas/ThresholdPlot"}})},
          {"400", error_reply("Malformed parameters")},
          {"404", error_reply("Unknown dataset or parameters off the sweep grid")}}}};

    json schemas;
    schemas["Error"] = {{"type", "object"}, {"properties", {{"error", {{"type", "string"}}}}}};
    schemas["Dataset"] = {{"type", "object"},
                          {"properties",
                           {{"id", {{"type", "string"}}},
                            {"name", {{"type", "string"}}},
                            {"points", {{"type", "integer"}}},
                            {"source_rows", {{"type", "integer"}}},
                            {"dropped_rows", {{"type", "integer"}}}}}};
    schemas["Ranges"] = {{"type", "object"},
                         {"properties", {{"sr", pair}, {"ps", pair}, {"op", pair}, {"clusters", pair}}}};
    schemas["JobRequest"] = {{"type", "object"},
                             {"required", {"dataset_id"}},
                             {"properties",
                              {{"dataset_id", {{"type", "string"}}},
                               {"ranges", {{"$ref", "#/components/schemas/Ranges"}}},
                               {"samplers", {{"type", "array"}, {"items", {{"type", "string"}}}}},
                               {"top_k", {{"type", "integer"}, {"minimum", 1}, {"default", kDefaultTopK}}},
                               {"seed", {{"type", "integer"}, {"default", kDefaultSeed}}}}}};
    schemas["Job"] = {
        {"type", "object"},
        {"properties",
         {{"id", {{"type", "string"}}},
          {"dataset_id", {{"type", "string"}}},
          {"state", {{"type", "string"}, {"enum", {"queued", "running", "done", "failed"}}}},
          {"progress",
           {{"type", "object"},
            {"properties", {{"evaluated", {{"type", "integer"}}}, {"total", {{"type", "integer"}}}}}}},
          {"ranges", {{"$ref", "#/components/schemas/Ranges"}}},
          {"samplers", {{"type", "array"}, {"items", {{"type", "string"}}}}},
          {"top_k", {{"type", "integer"}}},
          {"seed", {{"type", "integer"}}},
          {"error", {{"type", "string"}}}}}};
    schemas["ThresholdPlot"] = {
        {"type", "object"},
        {"properties",
         {{"bars",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"properties",
               {{"count", {{"type", "integer"}}},
                {"t_min", {{"type", "number"}}},
                {"t_max", {{"type", "number"}}},
                {"saliency", {{"type", "number"}}}}}}}}},
          {"domain_max", {{"type", "number"}}},
          {"auc", {{"type", "number"}}}}}};
    schemas["RankedDesign"] = {
        {"type", "object"},
        {"properties",
         {{"rank", {{"type", "integer"}}},
          {"params",
           {{"type", "object"},
            {"properties",
             {{"sampler", {{"type", "string"}}},
              {"rate", {{"type", "number"}}},
              {"point_area", {{"type", "number"}}},
              {"opacity", {{"type", "number"}}},
              {"seed", {{"type", "integer"}}}}}}},
          {"score",
           {{"type", "object"},
            {"properties", {{"value", {{"type", "number"}}}, {"count", {{"type", "integer"}}}}}}},
          {"plot", {{"$ref", "#/components/schemas/ThresholdPlot"}}},
          {"timings",
           {{"type", "object"},
            {"properties",
             {{"sample_ms", {{"type", "number"}}},
              {"render_ms", {{"type", "number"}}},
              {"topo_ms", {{"type", "number"}}}}}}}}}};

    return {{"openapi", "3.0.3"},
            {"info", {{"title", "scatteropt"}, {"version", "1.0.0"}}},
            {"paths", std::move(paths)},
            {"components", {{"schemas", std::move(schemas)}}}};
}

struct Service::Impl {
    explicit Impl(ServiceConfig cfg)
        : config(std::move(cfg)), registry(config.data_dir), jobs(registry, config.jobs) {
        routes();
    }

    void routes();

    ServiceConfig config;
    Registry registry;
    JobManager jobs;
    httplib::Server server;
};

void Service::Impl::routes() {
    server.set_payload_max_length(kMaxUpload);

    const bool has_ui = !config.static_dir.empty() && std::filesystem::exists(config.static_dir / "index.html");
    if (has_ui) {
        server.set_mount_point("/", config.static_dir.string());
    } else {
        server.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html");
        });
    }

    server.Get("/capabilities",
               [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, capabilities()); });

    server.Get("/openapi.json",
               [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, openapi_document()); });

    server.Get("/datasets", [this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const auto& info : registry.list()) out.push_back(dataset_json(info));
        send_json(res, 200, out);
    });

    server.Post("/datasets", [this](const httplib::Request& req, httplib::Response& res) {
        if (!req.is_multipart_form_data() || !req.has_file("file")) {
            send_error(res, 400, "expected multipart/form-data with a 'file' part");
            return;
        }
        const auto field = [&](const char* key) -> std::string {
            if (req.has_file(key)) return req.get_file_value(key).content;
            if (req.has_param(key)) return req.get_param_value(key);
            return {};
        };
        const auto file = req.get_file_value("file");
        const std::string x_col = field("x_col");
        const std::string y_col = field("y_col");
        if (x_col.empty() || y_col.empty()) {
            send_error(res, 400, "x_col and y_col are required");
            return;
        }
        std::string name = field("name");
        if (name.empty()) name = std::filesystem::path(file.filename).stem().string();
        try {
            const PointSet set = parse_csv(file.content, x_col, y_col, name);
            const std::string id = registry.add(set);
            send_json(res, 201, {{"dataset_id", id}});
        } catch (const DuplicateError& e) {
            send_error(res, 409, e.what());
        } catch (const Error& e) {
            send_error(res, 400, e.what());
        }
    });

    server.Get("/jobs", [this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const auto& job : jobs.list()) out.push_back(to_json(job));
        send_json(res, 200, out);
    });

    server.Post("/jobs", [this](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            send_error(res, 400, std::string("malformed JSON: ") + e.what());
            return;
        }
        JobRequest request;
        try {
            request = parse_job_request(body);
        } catch (const InvalidArgument& e) {
            // A missing dataset id is a malformed request; anything else in
            // the body is a semantic error.
            send_error(res, body.is_object() && body.contains("dataset_id") ? 422 : 400, e.what());
            return;
        }
        try {
            send_json(res, 202, {{"job_id", jobs.submit(std::move(request))}});
        } catch (const NotFoundError& e) {
            send_error(res, 404, e.what());
        } catch (const InvalidArgument& e) {
            send_error(res, 422, e.what());
        }
    });

    server.Get(R"(/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const auto job = jobs.get(req.matches[1].str());
        if (!job) {
            send_error(res, 404, "unknown job: " + req.matches[1].str());
            return;
        }
        send_json(res, 200, to_json(*job));
    });

    server.Get(R"(/jobs/([^/]+)/results)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto job = jobs.get(req.matches[1].str());
        if (!job) {
            send_error(res, 404, "unknown job: " + req.matches[1].str());
            return;
        }
        if (job->state != JobState::Done) {
            const std::string why = job->state == JobState::Failed ? "job failed: " + job->error
                                                                   : "job is " + std::string(to_string(job->state));
            send_error(res, 409, why);
            return;
        }
        const bool timings = req.has_param("timings") && req.get_param_value("timings") != "0";
        send_json(res, 200, to_json(std::span<const RankedDesign>(*job->result), timings));
    });

    server.Get("/render", [this](const httplib::Request& req, httplib::Response& res) {
        auto parsed = parse_design(req, registry);
        if (auto* err = std::get_if<std::pair<int, std::string>>(&parsed)) {
            send_error(res, err->first, err->second);
            return;
        }
        const auto& design = std::get<DesignRequest>(parsed);
        try {
            const SampledSet sampled = sample(*design.set, {design.params.sampler, design.params.rate, design.params.seed});
            const CoverageBuffer buffer =
                render(*design.set, sampled, {design.params.point_area, design.params.opacity});
            const auto png = encode_png(buffer);
            res.set_content(std::string(png.begin(), png.end()), "image/png");
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    });

    server.Get("/plots", [this](const httplib::Request& req, httplib::Response& res) {
        auto parsed = parse_design(req, registry);
        if (auto* err = std::get_if<std::pair<int, std::string>>(&parsed)) {
            send_error(res, err->first, err->second);
            return;
        }
        const auto& design = std::get<DesignRequest>(parsed);
        try {
            send_json(res, 200, to_json(evaluate(*design.set, design.params).plot));
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        } catch (...) {
            send_error(res, 500, "unknown error");
        }
    });
}

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

Registry& Service::registry() { return impl_->registry; }

JobManager& Service::jobs() { return impl_->jobs; }

}  // namespace scatteropt
