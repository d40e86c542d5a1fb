#include "scatteropt/registry.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "scatteropt/error.hpp"

namespace scatteropt {

namespace {

constexpr char kMagic[8] = {'S', 'O', 'P', 'T', 'P', 'T', 'S', '1'};
constexpr const char* kManifest = "datasets.json";

void write_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

// Write to a sibling temp file, then rename over the target.
template <typename Fn>
void atomic_write(const std::filesystem::path& path, Fn&& write) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        write(out);
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void write_points_file(const std::filesystem::path& path, const PointSet& set) {
    atomic_write(path, [&](std::ostream& out) {
        out.write(kMagic, sizeof kMagic);
        write_u64(out, set.points.size());
        write_u64(out, set.source_rows);
        write_u64(out, set.dropped_rows);
        for (const Point& p : set.points) out.write(reinterpret_cast<const char*>(&p.x), sizeof p.x);
        for (const Point& p : set.points) out.write(reinterpret_cast<const char*>(&p.y), sizeof p.y);
    });
}

PointSet read_points_file(const std::filesystem::path& path, std::string name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("missing dataset file: " + path.string());
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw DataError("corrupt dataset file: " + path.string());
    PointSet set;
    set.name = std::move(name);
    const std::uint64_t n = read_u64(in);
    set.source_rows = read_u64(in);
    set.dropped_rows = read_u64(in);
    std::vector<double> xs(n), ys(n);
    in.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(n * sizeof(double)));
    in.read(reinterpret_cast<char*>(ys.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw DataError("truncated dataset file: " + path.string());
    set.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) set.points[i] = {xs[i], ys[i]};
    return set;
}

Registry::Registry(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    load_manifest();
}

std::filesystem::path Registry::default_dir() {
    if (const char* env = std::getenv("SCATTEROPT_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return "data";
}

std::string Registry::make_id(std::string_view name) {
    std::string id;
    id.reserve(name.size());
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                        c == '_' || c == '-';
        id += ok ? c : '-';
    }
    return id;
}

std::filesystem::path Registry::data_file(std::string_view id) const {
    return dir_ / (std::string(id) + ".pts");
}

void Registry::load_manifest() {
    const auto path = dir_ / kManifest;
    if (!std::filesystem::exists(path)) return;
    std::ifstream in(path);
    const auto doc = nlohmann::json::parse(in);
    for (const auto& entry : doc.at("datasets")) {
        DatasetInfo info;
        info.id = entry.at("id").get<std::string>();
        info.name = entry.at("name").get<std::string>();
        info.points = entry.at("points").get<std::size_t>();
        info.source_rows = entry.at("source_rows").get<std::size_t>();
        info.dropped_rows = entry.value("dropped_rows", std::size_t{0});
        infos_.emplace(info.id, std::move(info));
    }
}

void Registry::write_manifest() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [id, info] : infos_) {
        list.push_back({{"id", info.id},
                        {"name", info.name},
                        {"points", info.points},
                        {"source_rows", info.source_rows},
                        {"dropped_rows", info.dropped_rows},
                        {"file", id + ".pts"}});
    }
    const nlohmann::json doc = {{"version", 1}, {"datasets", std::move(list)}};
    atomic_write(dir_ / kManifest, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

std::string Registry::add(const PointSet& set) {
    if (set.name.empty()) throw DataError("dataset name must be nonempty");
    if (set.points.empty()) throw DataError("dataset must contain at least one point");
    std::string id = make_id(set.name);

    std::unique_lock lock(mutex_);
    if (infos_.contains(id)) throw DuplicateError("duplicate dataset: " + id);
    write_points_file(data_file(id), set);
    infos_.emplace(id, DatasetInfo{id, set.name, set.points.size(), set.source_rows, set.dropped_rows});
    write_manifest();
    loaded_.emplace(id, std::make_shared<const PointSet>(set));
    return id;
}

std::shared_ptr<const PointSet> Registry::get(std::string_view id) const {
    {
        std::shared_lock lock(mutex_);
        if (auto it = loaded_.find(id); it != loaded_.end()) return it->second;
        if (!infos_.contains(id)) throw NotFoundError("unknown dataset: " + std::string(id));
    }
    std::unique_lock lock(mutex_);
    if (auto it = loaded_.find(id); it != loaded_.end()) return it->second;
    const auto& info = infos_.find(id)->second;
    auto set = std::make_shared<const PointSet>(read_points_file(data_file(id), info.name));
    loaded_.emplace(std::string(id), set);
    return set;
}

bool Registry::contains(std::string_view id) const {
    std::shared_lock lock(mutex_);
    return infos_.find(id) != infos_.end();
}

std::vector<DatasetInfo> Registry::list() const {
    std::shared_lock lock(mutex_);
    std::vector<DatasetInfo> out;
    out.reserve(infos_.size());
    for (const auto& [id, info] : infos_) out.push_back(info);
    return out;
}

}  // namespace scatteropt
