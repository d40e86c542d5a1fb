#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "scatteropt/jobs.hpp"
#include "scatteropt/registry.hpp"
#include "scatteropt/serialize.hpp"

namespace scatteropt {

inline constexpr const char* kDefaultBind = "127.0.0.1";
inline constexpr int kDefaultPort = 8787;

struct ServiceConfig {
    std::filesystem::path data_dir = Registry::default_dir();
    /// Built web UI served at `/`; a placeholder page is served when absent.
    std::filesystem::path static_dir;
    JobManagerOptions jobs;
};

/// Grids, samplers and defaults the UI uses to bound its controls.
json capabilities();

/// OpenAPI description of the HTTP API (also checked in under docs/).
json openapi_document();

/// HTTP front end over the registry, job manager and render/plot operations.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves until stop(); returns false when the bind fails.
    bool listen(const std::string& host, int port);
    /// Binds to an ephemeral port (returns it, or -1) without serving yet.
    int bind_any_port(const std::string& host);
    /// Serves on a socket bound by bind_any_port until stop().
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

    Registry& registry();
    JobManager& jobs();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace scatteropt
