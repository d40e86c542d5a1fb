#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "scatteropt/dataset.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("scatteropt-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        const auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline scatteropt::PointSet five_clusters(std::size_t n, std::uint64_t seed = 1) {
    const auto centers = scatteropt::five_cluster_centers();
    return scatteropt::gaussian_mixture(n, centers, 0.03, seed, "five-clusters");
}

}  // namespace testing
