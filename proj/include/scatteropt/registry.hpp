#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "scatteropt/dataset.hpp"

namespace scatteropt {

struct DatasetInfo {
    std::string id;
    std::string name;
    std::size_t points = 0;
    std::size_t source_rows = 0;
    std::size_t dropped_rows = 0;
};

/// Named dataset store backed by a directory: one columnar binary file per
/// dataset plus a JSON manifest. Reads are concurrent; writes are serialized.
class Registry {
public:
    explicit Registry(std::filesystem::path dir);

    /// Directory from SCATTEROPT_DATA_DIR, or ./data.
    static std::filesystem::path default_dir();

    /// Stores `set` under an id derived from its name. Throws DuplicateError
    /// if the id exists and DataError for an empty name or empty set.
    std::string add(const PointSet& set);

    /// Throws NotFoundError for an unknown id.
    std::shared_ptr<const PointSet> get(std::string_view id) const;

    bool contains(std::string_view id) const;
    std::vector<DatasetInfo> list() const;

    const std::filesystem::path& dir() const { return dir_; }

    /// Maps a free-form name to the id alphabet [A-Za-z0-9._-].
    static std::string make_id(std::string_view name);

private:
    void load_manifest();
    void write_manifest() const;
    std::filesystem::path data_file(std::string_view id) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, DatasetInfo, std::less<>> infos_;
    mutable std::map<std::string, std::shared_ptr<const PointSet>, std::less<>> loaded_;
};

/// Columnar binary encoding of a PointSet (little-endian on all supported hosts).
void write_points_file(const std::filesystem::path& path, const PointSet& set);
PointSet read_points_file(const std::filesystem::path& path, std::string name);

}  // namespace scatteropt
