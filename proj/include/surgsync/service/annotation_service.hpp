#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace surgsync::service {

struct ServiceOptions {
    std::filesystem::path root;                      // directory holding run_<id>/ folders
    std::optional<std::filesystem::path> static_dir;  // UI assets served at /
    std::string cors_origin = "*";
};

/// HTTP playback and annotation API over finished runs. Everything is
/// read-only except the annotations endpoint.
///
///   GET  /runs
///   GET  /runs/{id}/frames/{view}/{index}      PNG bytes, X-Ref-Stamp header
///   GET  /runs/{id}/kinematics?stream=&from=&to=
///   GET  /runs/{id}/annotations
///   PUT  /runs/{id}/annotations                409 stale revision, 422 invalid
class AnnotationService {
public:
    explicit AnnotationService(ServiceOptions opts);
    ~AnnotationService();
    AnnotationService(const AnnotationService&) = delete;
    AnnotationService& operator=(const AnnotationService&) = delete;

    /// Binds to host:port; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Requires a successful bind().
    void listen();
    void stop();
    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace surgsync::service
