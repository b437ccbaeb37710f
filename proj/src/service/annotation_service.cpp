#include "surgsync/service/annotation_service.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/png_io.hpp"
#include "surgsync/dataset/annotations.hpp"
#include "surgsync/dataset/manifest.hpp"
#include "surgsync/dataset/reformat.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace surgsync::service {

namespace {

struct ApiError {
    int status;
    std::string code;
    std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ApiError& e) {
    send_json(res, e.status, {{"status", e.status}, {"code", e.code}, {"message", e.message}});
}

bool valid_run_id(const std::string& id) {
    return !id.empty() && id != "." && id != ".." && id.find('/') == std::string::npos &&
           id.find('\\') == std::string::npos;
}

std::int64_t parse_stamp(const std::string& text, const char* name) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ApiError{400, "bad_request", fmt::format("'{}' is not an integer nanosecond stamp", name)};
    return v;
}

}  // namespace

struct AnnotationService::Impl {
    ServiceOptions opts;
    httplib::Server server;
    bool bound = false;

    fs::path run_dir(const std::string& id) const {
        if (!valid_run_id(id)) throw ApiError{404, "unknown_run", fmt::format("no run '{}'", id)};
        auto dir = opts.root / layout::run_dir_name(id);
        std::error_code ec;
        if (!fs::is_regular_file(dir / layout::kManifest, ec))
            throw ApiError{404, "unknown_run", fmt::format("no run '{}'", id)};
        return dir;
    }

    RunManifest manifest(const fs::path& dir) const {
        try {
            return read_manifest(dir);
        } catch (const std::exception& e) {
            throw ApiError{500, "bad_manifest", e.what()};
        }
    }

    json list_runs() const {
        std::vector<fs::path> dirs;
        std::error_code ec;
        for (const auto& entry : fs::directory_iterator(opts.root, ec)) {
            const auto name = entry.path().filename().string();
            if (entry.is_directory() && name.rfind("run_", 0) == 0 &&
                fs::is_regular_file(entry.path() / layout::kManifest))
                dirs.push_back(entry.path());
        }
        std::sort(dirs.begin(), dirs.end());
        auto out = json::array();
        for (const auto& dir : dirs) {
            json item{{"run_id", dir.filename().string().substr(4)}};
            try {
                RunManifest m = read_manifest(dir);
                item["run_id"] = m.run_id;
                item["packet_count"] = m.packet_count;
                item["recorder_mode"] = std::string(to_string(m.recorder_mode));
                item["dirty"] = m.dirty || !validate_run(dir).empty();
            } catch (const std::exception&) {
                item["packet_count"] = 0;
                item["recorder_mode"] = nullptr;
                item["dirty"] = true;
            }
            out.push_back(std::move(item));
        }
        return out;
    }

    void frame(const httplib::Request& req, httplib::Response& res) const {
        const auto dir = run_dir(req.matches[1]);
        const std::string view = req.matches[2];
        const RunManifest m = manifest(dir);
        const bool known_view = std::any_of(m.streams.begin(), m.streams.end(),
                                            [&](const auto& d) { return d.is_image() && d.view_name() == view; });
        if (!known_view) throw ApiError{404, "unknown_view", fmt::format("run has no '{}' view", view)};
        std::uint64_t idx = 0;
        const std::string idx_text = req.matches[3];
        auto [p, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
        if (ec != std::errc{} || idx >= m.ref_stamps.size())
            throw ApiError{404, "unknown_frame", fmt::format("no frame {} in view '{}'", idx_text, view)};
        const auto path = layout::frame_path(dir, view, idx);
        std::error_code fec;
        if (!fs::is_regular_file(path, fec))
            throw ApiError{404, "unknown_frame", fmt::format("no frame {} in view '{}'", idx_text, view)};
        auto bytes = read_file_bytes(path);
        res.status = 200;
        res.set_header("X-Ref-Stamp", std::to_string(m.ref_stamps[idx].nanos));
        res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
    }

    void kinematics(const httplib::Request& req, httplib::Response& res) const {
        const auto dir = run_dir(req.matches[1]);
        const RunManifest m = manifest(dir);
        if (!req.has_param("stream")) throw ApiError{400, "bad_request", "missing 'stream' parameter"};
        const auto stream = req.get_param_value("stream");
        const auto* d = m.find_stream(stream);
        if (d == nullptr || !d->is_numeric())
            throw ApiError{404, "unknown_stream", fmt::format("run has no numeric stream '{}'", stream)};
        const std::int64_t from =
            req.has_param("from") ? parse_stamp(req.get_param_value("from"), "from") : std::numeric_limits<std::int64_t>::min();
        const std::int64_t to =
            req.has_param("to") ? parse_stamp(req.get_param_value("to"), "to") : std::numeric_limits<std::int64_t>::max();
        auto out = json::array();
        for (const auto& r : read_records(layout::records_path(dir, stream)))
            if (r.stamp.nanos >= from && r.stamp.nanos <= to) out.push_back(json::parse(encode_record_line(r)));
        send_json(res, 200, out);
    }

    void get_annotations(const httplib::Request& req, httplib::Response& res) const {
        send_json(res, 200, read_annotations(run_dir(req.matches[1])));
    }

    void put_annotations(const httplib::Request& req, httplib::Response& res) const {
        const auto dir = run_dir(req.matches[1]);
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            throw ApiError{400, "bad_request", fmt::format("body is not valid JSON: {}", e.what())};
        }
        AnnotationSet a;
        try {
            a = body.get<AnnotationSet>();
        } catch (const json::exception& e) {
            throw ApiError{422, "invalid_annotation", e.what()};
        }
        try {
            send_json(res, 200, write_annotations(dir, std::move(a)));
        } catch (const AnnotationConflict& e) {
            res.status = 409;
            res.set_content(json{{"status", 409},
                                 {"code", "revision_conflict"},
                                 {"message", e.what()},
                                 {"current_revision", e.current()}}
                                .dump(),
                            "application/json");
        } catch (const AnnotationInvalid& e) {
            throw ApiError{422, "invalid_annotation", e.what()};
        }
    }

    template <typename Fn>
    httplib::Server::Handler guarded(Fn fn) const {
        return [this, fn](const httplib::Request& req, httplib::Response& res) {
            try {
                (this->*fn)(req, res);
            } catch (const ApiError& e) {
                send_error(res, e);
            } catch (const IoError& e) {
                send_error(res, {500, "io_error", e.what()});
            } catch (const std::exception& e) {
                send_error(res, {500, "internal", e.what()});
            }
        };
    }

    void routes() {
        server.Get("/runs", [this](const httplib::Request&, httplib::Response& res) {
            try {
                send_json(res, 200, list_runs());
            } catch (const std::exception& e) {
                send_error(res, {500, "internal", e.what()});
            }
        });
        server.Get(R"(/runs/([^/]+)/frames/([^/]+)/(\d+))", guarded(&Impl::frame));
        server.Get(R"(/runs/([^/]+)/kinematics)", guarded(&Impl::kinematics));
        server.Get(R"(/runs/([^/]+)/annotations)", guarded(&Impl::get_annotations));
        server.Put(R"(/runs/([^/]+)/annotations)", guarded(&Impl::put_annotations));
        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", opts.cors_origin);
            res.set_header("Access-Control-Allow-Methods", "GET, PUT, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.set_header("Access-Control-Expose-Headers", "X-Ref-Stamp");
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) send_error(res, {res.status, "not_found", "no such endpoint"});
        });
        if (opts.static_dir && !server.set_mount_point("/", opts.static_dir->string()))
            throw IoError(fmt::format("static directory {} does not exist", opts.static_dir->string()));
    }
};

AnnotationService::AnnotationService(ServiceOptions opts) : impl_(std::make_unique<Impl>()) {
    std::error_code ec;
    if (!fs::is_directory(opts.root, ec))
        throw IoError(fmt::format("dataset root {} is not a directory", opts.root.string()));
    impl_->opts = std::move(opts);
    impl_->routes();
}

AnnotationService::~AnnotationService() { stop(); }

int AnnotationService::bind(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw IoError(fmt::format("cannot bind {}:{}", host, port));
    impl_->bound = true;
    return bound;
}

void AnnotationService::listen() {
    if (!impl_->bound) throw Error("AnnotationService::listen before bind");
    spdlog::info("serving {}", impl_->opts.root.string());
    if (!impl_->server.listen_after_bind()) throw IoError("HTTP server stopped with an error");
}

void AnnotationService::stop() { impl_->server.stop(); }

bool AnnotationService::running() const { return impl_->server.is_running(); }

}  // namespace surgsync::service
