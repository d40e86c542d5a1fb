#include <doctest.h>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "scatteropt/serialize.hpp"
#include "support.hpp"

using namespace scatteropt;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::initializer_list<std::string> args) {
    std::vector<std::string> owned{"scatteropt"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : owned) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> result;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) result.push_back(line);
    return result;
}

std::string csv_of(const PointSet& set) {
    std::ostringstream out;
    out.precision(17);
    out << "x,y,label\n";
    for (const auto& p : set.points) out << p.x << ',' << p.y << ",a\n";
    return out.str();
}

}  // namespace

TEST_CASE("optimize with a single combination yields one design") {
    testing::TempDir dir;
    const auto csv = dir.write("pts.csv", csv_of(testing::five_clusters(400, 2)));
    const auto out = dir / "one.json";
    const auto r = run({"optimize", "--data", csv.string(), "--sr", "0.5", "--ps", "40", "--op", "0.2", "--samplers",
                        "random", "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("evaluated 1 designs on 400 points") != std::string::npos);
    const json j = json::parse(slurp(out));
    REQUIRE(j.size() == 1);
    CHECK(j[0]["rank"] == 1);
    CHECK(j[0]["params"]["sampler"] == "random");
    CHECK(j[0]["params"]["rate"] == 0.5);
    CHECK(j[0]["params"]["point_area"] == 40.0);
    CHECK(j[0]["params"]["opacity"] == 0.2);
}

TEST_CASE("optimize --top keeps the best designs in order and is reproducible") {
    testing::TempDir dir;
    const auto csv = dir.write("pts.csv", csv_of(testing::five_clusters(500, 3)));
    const auto a = dir / "a.json";
    const auto b = dir / "b.json";
    for (const auto& path : {a, b}) {
        const auto r = run({"optimize", "--data", csv.string(), "--sr", "0.1:0.3", "--ps", "20,80", "--op",
                            "0.05,0.4", "--samplers", "random,blue_noise,svd", "--top", "3", "--seed", "7", "--out",
                            path.string()});
        REQUIRE(r.code == kExitOk);
        CHECK(r.out.find("evaluated 60 designs") != std::string::npos);
    }
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    const json j = json::parse(text);
    REQUIRE(j.size() == 3);
    for (std::size_t i = 1; i < j.size(); ++i)
        CHECK(j[i - 1]["score"]["value"].get<double>() >= j[i]["score"]["value"].get<double>());
    for (std::size_t i = 0; i < j.size(); ++i) CHECK(j[i]["rank"] == i + 1);

    const auto c = dir / "c.json";
    REQUIRE(run({"optimize", "--data", csv.string(), "--sr", "0.1:0.3", "--ps", "20,80", "--op", "0.05,0.4",
                 "--samplers", "random,blue_noise,svd", "--top", "3", "--seed", "7", "--jobs", "1", "--out",
                 c.string()})
                .code == kExitOk);
    CHECK(slurp(c) == text);
}

TEST_CASE("optimize honours a cluster range") {
    const auto r = run({"optimize", "--synthetic", "400", "--sr", "0.2", "--ps", "40", "--op", "0.1,0.8",
                        "--samplers", "random", "--clusters", "5:10", "--top", "2"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("evaluated 2 designs on 400 points") != std::string::npos);
}

TEST_CASE("load then optimize a registered dataset") {
    testing::TempDir dir;
    const auto csv = dir.write("blobs.csv", csv_of(testing::five_clusters(300, 4)));
    const auto reg = dir / "registry";
    const auto loaded = run({"load", "--data", csv.string(), "--name", "blobs", "--data-dir", reg.string()});
    REQUIRE(loaded.code == kExitOk);
    CHECK(loaded.out == "blobs\n");
    CHECK(run({"load", "--data", csv.string(), "--name", "blobs", "--data-dir", reg.string()}).code == kExitData);

    const auto r = run({"optimize", "--dataset", "blobs", "--data-dir", reg.string(), "--sr", "0.5", "--ps", "40",
                        "--op", "0.2", "--samplers", "random"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("evaluated 1 designs on 300 points") != std::string::npos);
    CHECK(run({"optimize", "--dataset", "nope", "--data-dir", reg.string()}).code == kExitData);
}

TEST_CASE("render writes a PNG") {
    testing::TempDir dir;
    const auto out = dir / "plot.png";
    const auto r = run({"render", "--synthetic", "300", "--sampler", "blue_noise", "--rate", "0.4", "--ps", "40",
                        "--op", "0.2", "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    const std::string png = slurp(out);
    REQUIRE(png.size() > 8);
    CHECK(png.substr(1, 3) == "PNG");
}

TEST_CASE("benchmarks and quality ranking write CSV") {
    SUBCASE("bench-sampling emits one row per cell") {
        const auto r = run({"bench-sampling", "--synthetic", "500", "--samplers", "random", "--sr", "0.3", "--reps",
                            "2"});
        REQUIRE(r.code == kExitOk);
        const auto rows = lines(r.out);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0] == "kind,rate,median_ms,reps");
        CHECK(rows[1].rfind("random,0.3,", 0) == 0);
        CHECK(rows[1].substr(rows[1].rfind(',') + 1) == "2");
    }
    SUBCASE("quality with a single sampler wins every cell") {
        const auto r = run({"quality", "--synthetic", "400", "--samplers", "random", "--sr", "0.2:0.25", "--ps", "40",
                            "--op", "0.1,0.4", "--reps", "2"});
        REQUIRE(r.code == kExitOk);
        const auto rows = lines(r.out);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0] == "kind,rate,win_fraction,median_ms,reps");
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].find(",1,") != std::string::npos);
    }
    SUBCASE("bench-scaling reports each size") {
        testing::TempDir dir;
        const auto out = dir / "scaling.csv";
        const auto r = run({"bench-scaling", "--sizes", "1000,4000", "--reps", "1", "--out", out.string()});
        REQUIRE(r.code == kExitOk);
        const auto rows = lines(slurp(out));
        REQUIRE(rows.size() == 3);
        CHECK(rows[0] == "n,render_topo_ms,reps");
        CHECK(rows[1].rfind("1000,", 0) == 0);
        CHECK(rows[2].rfind("4000,", 0) == 0);
    }
}

TEST_CASE("exit codes") {
    testing::TempDir dir;
    const auto csv = dir.write("pts.csv", "x,y\n0,0\n1,1\n");
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"optimize"}).code == kExitUsage);
    CHECK(run({"optimize", "--data", csv.string(), "--sr", "0.6:0.2"}).code == kExitUsage);
    CHECK(run({"optimize", "--data", csv.string(), "--samplers", "nope"}).code == kExitUsage);
    CHECK(run({"optimize", "--data", csv.string(), "--top", "0"}).code == kExitUsage);
    CHECK(run({"optimize", "--data", csv.string(), "--clusters", "5"}).code == kExitUsage);
    CHECK(run({"render", "--data", csv.string()}).code == kExitUsage);

    const auto missing = run({"optimize", "--data", (dir / "absent.csv").string()});
    CHECK(missing.code == kExitData);
    CHECK(missing.err.rfind("data error:", 0) == 0);
    const auto bad_col = run({"optimize", "--data", csv.string(), "--x-col", "nope"});
    CHECK(bad_col.code == kExitData);
    CHECK(bad_col.err.find("nope") != std::string::npos);
}

TEST_CASE("serve --print-openapi prints the document") {
    const auto r = run({"serve", "--print-openapi"});
    REQUIRE(r.code == kExitOk);
    CHECK(json::parse(r.out)["openapi"] == "3.0.3");
}
