#include <doctest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "scatteropt/raster.hpp"
#include "scatteropt/service.hpp"
#include "support.hpp"

using namespace scatteropt;

namespace {

using namespace std::chrono_literals;

class RunningService {
public:
    explicit RunningService(const std::filesystem::path& dir, unsigned workers = 2)
        : service_(ServiceConfig{dir, {}, {1, workers}}) {
        port_ = service_.bind_any_port("127.0.0.1");
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { service_.listen_after_bind(); });
        service_.wait_until_ready();
    }
    ~RunningService() {
        service_.stop();
        thread_.join();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(60, 0);
        return c;
    }
    Service& service() { return service_; }

private:
    Service service_;
    int port_ = -1;
    std::thread thread_;
};

std::string csv_of(const PointSet& set) {
    std::ostringstream out;
    out.precision(17);
    out << "px,py\n";
    for (const auto& p : set.points) out << p.x << ',' << p.y << '\n';
    return out.str();
}

httplib::Result upload(httplib::Client& c, const std::string& csv, const std::string& x, const std::string& y,
                       const std::string& name) {
    httplib::MultipartFormDataItems items{{"file", csv, "points.csv", "text/csv"},
                                          {"x_col", x, "", ""},
                                          {"y_col", y, "", ""},
                                          {"name", name, "", ""}};
    return c.Post("/datasets", items);
}

json body(const httplib::Result& res) { return json::parse(res->body); }

std::string submit(httplib::Client& c, const json& request) {
    const auto res = c.Post("/jobs", request.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 202);
    return body(res)["job_id"].get<std::string>();
}

json wait_done(httplib::Client& c, const std::string& id) {
    for (int i = 0; i < 1200; ++i) {
        const auto res = c.Get("/jobs/" + id);
        REQUIRE(res);
        REQUIRE(res->status == 200);
        const json job = body(res);
        if (job["state"] == "done" || job["state"] == "failed") return job;
        std::this_thread::sleep_for(50ms);
    }
    FAIL("job did not finish");
    return {};
}

}  // namespace

TEST_CASE("static and discovery endpoints") {
    testing::TempDir dir;
    RunningService running(dir.path());
    auto c = running.client();

    const auto root = c.Get("/");
    REQUIRE(root);
    CHECK(root->status == 200);
    CHECK(root->get_header_value("Content-Type").rfind("text/html", 0) == 0);

    const auto caps = c.Get("/capabilities");
    REQUIRE(caps);
    const json j = body(caps);
    CHECK(j["rates"].size() == 19);
    CHECK(j["point_areas"] == json({20.0, 40.0, 60.0, 80.0}));
    CHECK(j["opacities"].size() == 6);
    CHECK(j["samplers"].size() == 14);
    CHECK(j["defaults"]["top_k"] == 3);

    const auto api = c.Get("/openapi.json");
    REQUIRE(api);
    CHECK(body(api) == openapi_document());
}

TEST_CASE("checked-in OpenAPI document is current") {
    std::ifstream in(std::string(SCATTEROPT_SOURCE_DIR) + "/docs/openapi.json");
    REQUIRE(in);
    CHECK(json::parse(in) == openapi_document());
}

TEST_CASE("static UI directory is served at the root") {
    testing::TempDir data, ui;
    ui.write("index.html", "<html>ui</html>");
    Service service(ServiceConfig{data.path(), ui.path(), {}});
    const int port = service.bind_any_port("127.0.0.1");
    std::thread t([&] { service.listen_after_bind(); });
    service.wait_until_ready();
    httplib::Client c("127.0.0.1", port);
    const auto res = c.Get("/");
    REQUIRE(res);
    CHECK(res->body == "<html>ui</html>");
    service.stop();
    t.join();
}

TEST_CASE("dataset upload") {
    testing::TempDir dir;
    RunningService running(dir.path());
    auto c = running.client();
    const std::string csv = "a,b\n0,0\n5,10\n10,20\n";

    const auto ok = upload(c, csv, "a", "b", "small");
    REQUIRE(ok);
    CHECK(ok->status == 201);
    CHECK(body(ok)["dataset_id"] == "small");

    const auto bad = upload(c, csv, "a", "nope", "other");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(body(bad)["error"].get<std::string>().find("missing column: nope") != std::string::npos);

    const auto dup = upload(c, csv, "a", "b", "small");
    REQUIRE(dup);
    CHECK(dup->status == 409);

    const auto list = c.Get("/datasets");
    REQUIRE(list);
    const json datasets = body(list);
    REQUIRE(datasets.size() == 1);
    CHECK(datasets[0]["id"] == "small");
    CHECK(datasets[0]["points"] == 3);

    const auto not_multipart = c.Post("/datasets", csv, "text/csv");
    REQUIRE(not_multipart);
    CHECK(not_multipart->status == 400);
}

TEST_CASE("jobs: validation, results and equivalence with the library") {
    testing::TempDir dir;
    RunningService running(dir.path());
    auto c = running.client();
    const auto set = testing::five_clusters(600, 3);
    REQUIRE(upload(c, csv_of(set), "px", "py", "clusters")->status == 201);
    const auto stored = running.service().registry().get("clusters");

    SUBCASE("error statuses") {
        CHECK(c.Post("/jobs", "{not json", "application/json")->status == 400);
        CHECK(c.Post("/jobs", R"({"ranges":{}})", "application/json")->status == 400);
        CHECK(c.Post("/jobs", R"({"dataset_id":"missing"})", "application/json")->status == 404);
        CHECK(c.Post("/jobs", R"({"dataset_id":"clusters","ranges":{"sr":[0.6,0.2]}})", "application/json")->status ==
              422);
        CHECK(c.Post("/jobs", R"({"dataset_id":"clusters","samplers":["nope"]})", "application/json")->status == 422);
        CHECK(c.Post("/jobs", R"({"dataset_id":"clusters","top_k":0})", "application/json")->status == 422);
        CHECK(c.Get("/jobs/job-999999")->status == 404);
        CHECK(c.Get("/jobs/job-999999/results")->status == 404);
    }

    SUBCASE("defaults run to completion and match a direct sweep") {
        const std::string id = submit(c, {{"dataset_id", "clusters"}});
        const json job = wait_done(c, id);
        CHECK(job["state"] == "done");
        CHECK(job["progress"]["evaluated"] == 6384);
        CHECK(job["progress"]["total"] == 6384);
        const auto res = c.Get("/jobs/" + id + "/results");
        REQUIRE(res->status == 200);
        const json results = body(res);
        REQUIRE(results.size() == 3);
        for (std::size_t i = 1; i < results.size(); ++i)
            CHECK(results[i - 1]["score"]["value"].get<double>() >= results[i]["score"]["value"].get<double>());
        CHECK_FALSE(results[0].contains("timings"));

        SweepOptions options;
        const auto direct = sweep(*stored, options);
        CHECK(results == to_json(std::span<const RankedDesign>(direct.ranked), false));

        const json timed = body(c.Get("/jobs/" + id + "/results?timings=1"));
        CHECK(timed[0].contains("timings"));
    }

    SUBCASE("cluster range and explicit parameters") {
        const json request = {{"dataset_id", "clusters"},
                              {"ranges", {{"sr", {0.1, 0.3}}, {"op", {0.05, 0.2}}, {"clusters", {5, 10}}}},
                              {"samplers", {"random", "blue_noise", "z_order"}},
                              {"top_k", 6},
                              {"seed", 9}};
        const std::string id = submit(c, request);
        CHECK(wait_done(c, id)["state"] == "done");
        const json results = body(c.Get("/jobs/" + id + "/results"));
        REQUIRE(results.size() == 6);
        for (const auto& d : results) {
            const auto count = d["score"]["count"].get<std::size_t>();
            CHECK((d["score"]["value"] == 0.0 || (count >= 5 && count <= 10)));
        }

        SweepOptions options;
        options.ranges = ranges_from_json(request["ranges"]);
        options.samplers = {SamplerKind::Random, SamplerKind::BlueNoise, SamplerKind::ZOrder};
        options.top_k = 6;
        options.seed = 9;
        options.workers = 1;
        CHECK(results == to_json(std::span<const RankedDesign>(sweep(*stored, options).ranked), false));
    }

    SUBCASE("results are refused until the job is done") {
        // One job slot: the second job waits behind the first.
        const std::string first = submit(c, {{"dataset_id", "clusters"}});
        const std::string second = submit(c, {{"dataset_id", "clusters"}, {"ranges", {{"sr", {0.5, 0.5}}}}});
        const auto early = c.Get("/jobs/" + second + "/results");
        REQUIRE(early);
        CHECK(early->status == 409);
        CHECK(body(c.Get("/jobs/" + second))["state"] == "queued");
        wait_done(c, first);
        wait_done(c, second);
        CHECK(c.Get("/jobs/" + second + "/results")->status == 200);
        CHECK(body(c.Get("/jobs")).size() == 2);
    }
}

TEST_CASE("render and plots") {
    testing::TempDir dir;
    RunningService running(dir.path());
    auto c = running.client();
    const auto set = testing::five_clusters(500, 4);
    REQUIRE(upload(c, csv_of(set), "px", "py", "blobs")->status == 201);
    const auto stored = running.service().registry().get("blobs");

    const std::string query = "dataset=blobs&sampler=blue_noise&rate=0.3&point_area=40&opacity=0.2&seed=5";
    const auto a = c.Get("/render?" + query);
    const auto b = c.Get("/render?" + query);
    REQUIRE(a);
    REQUIRE(a->status == 200);
    CHECK(a->get_header_value("Content-Type") == "image/png");
    CHECK(a->body == b->body);
    const SampledSet sampled = sample(*stored, {SamplerKind::BlueNoise, 0.3, 5});
    const auto png = encode_png(render(*stored, sampled, {40, 0.2}));
    CHECK(a->body == std::string(png.begin(), png.end()));

    const auto plot = c.Get("/plots?" + query);
    REQUIRE(plot->status == 200);
    CHECK(body(plot) == to_json(evaluate(*stored, {SamplerKind::BlueNoise, 0.3, 40, 0.2, 5}).plot));

    CHECK(c.Get("/render?dataset=blobs&sampler=random&rate=0.33&point_area=40&opacity=0.2")->status == 404);
    CHECK(c.Get("/render?dataset=blobs&sampler=random&rate=0.3&point_area=50&opacity=0.2")->status == 404);
    CHECK(c.Get("/render?dataset=nope&sampler=random&rate=0.3&point_area=40&opacity=0.2")->status == 404);
    CHECK(c.Get("/render?dataset=blobs&sampler=bogus&rate=0.3&point_area=40&opacity=0.2")->status == 404);
    CHECK(c.Get("/render?dataset=blobs&sampler=random&rate=abc&point_area=40&opacity=0.2")->status == 400);
    CHECK(c.Get("/plots?dataset=blobs&sampler=random&rate=0.3&opacity=0.2")->status == 400);
}

TEST_CASE("job store survives a restart") {
    testing::TempDir dir;
    std::string id;
    json before;
    {
        RunningService running(dir.path());
        auto c = running.client();
        REQUIRE(upload(c, csv_of(testing::five_clusters(300, 5)), "px", "py", "keep")->status == 201);
        id = submit(c, {{"dataset_id", "keep"}, {"ranges", {{"sr", {0.2, 0.4}}}}, {"samplers", {"random"}}});
        CHECK(wait_done(c, id)["state"] == "done");
        before = body(c.Get("/jobs/" + id + "/results?timings=1"));
    }
    RunningService restarted(dir.path());
    auto c = restarted.client();
    const auto job = c.Get("/jobs/" + id);
    REQUIRE(job);
    REQUIRE(job->status == 200);
    CHECK(body(job)["state"] == "done");
    CHECK(body(c.Get("/jobs/" + id + "/results?timings=1")) == before);
    const std::string next = submit(c, {{"dataset_id", "keep"}, {"ranges", {{"sr", {0.2, 0.2}}}}});
    CHECK(next != id);
}

TEST_CASE("stored queued jobs resume and running jobs are marked failed") {
    testing::TempDir dir;
    {
        Registry registry(dir.path());
        registry.add(testing::five_clusters(200, 6));
    }
    const json store = json::array(
        {{{"id", "job-000001"}, {"dataset_id", "five-clusters"}, {"state", "running"},
          {"progress", {{"evaluated", 10}, {"total", 456}}}, {"ranges", json::object()}, {"samplers", {"random"}},
          {"top_k", 3}, {"seed", 42}, {"error", ""}},
         {{"id", "job-000002"}, {"dataset_id", "five-clusters"}, {"state", "queued"},
          {"progress", {{"evaluated", 0}, {"total", 24}}}, {"ranges", {{"sr", {0.5, 0.5}}}}, {"samplers", {"random"}},
          {"top_k", 3}, {"seed", 42}, {"error", ""}}});
    std::ofstream(dir / "jobs.json") << store.dump();

    Registry registry(dir.path());
    JobManager jobs(registry, {1, 1});
    const auto failed = jobs.get("job-000001");
    REQUIRE(failed);
    CHECK(failed->state == JobState::Failed);
    const auto resumed = jobs.wait("job-000002", std::chrono::seconds(60));
    REQUIRE(resumed);
    CHECK(resumed->state == JobState::Done);
    CHECK(resumed->result->size() == 3);
}
