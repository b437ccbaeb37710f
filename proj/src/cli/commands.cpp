#include "commands.hpp"

#include "surgsync/analysis/latency.hpp"
#include "surgsync/core/error.hpp"
#include "surgsync/core/json_io.hpp"
#include "surgsync/core/png_io.hpp"
#include "surgsync/core/synthetic_source.hpp"
#include "surgsync/dataset/annotations.hpp"
#include "surgsync/dataset/manifest.hpp"
#include "surgsync/dataset/offline_layout.hpp"
#include "surgsync/dataset/reformat.hpp"
#include "surgsync/post/contact.hpp"
#include "surgsync/post/depth.hpp"
#include "surgsync/post/float_io.hpp"
#include "surgsync/post/geometry.hpp"
#include "surgsync/post/image_ops.hpp"
#include "surgsync/recorder/offline_recorder.hpp"
#include "surgsync/recorder/online_session.hpp"
#include "surgsync/service/annotation_service.hpp"

#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace surgsync::cli {

using nlohmann::json;

namespace {

// Synthetic streams start one second into the time base so every stamp, and
// therefore every packet folder name, is positive.
constexpr Timestamp kRecordEpoch = Timestamp::from_seconds(1);

/// Raises a stop flag on a 'q' keypress or when the external flag is set.
/// Puts an interactive terminal in non-canonical mode for its lifetime.
class StopWatcher {
public:
    explicit StopWatcher(const std::atomic<bool>* external) : external_(external) {
        tty_ = ::isatty(STDIN_FILENO) == 1 && ::tcgetattr(STDIN_FILENO, &saved_) == 0;
        if (tty_) {
            termios raw = saved_;
            raw.c_lflag &= ~static_cast<tcflag_t>(ICANON | ECHO);
            raw.c_cc[VMIN] = 0;
            raw.c_cc[VTIME] = 0;
            ::tcsetattr(STDIN_FILENO, TCSANOW, &raw);
            spdlog::info("press 'q' to stop recording");
        }
        if (tty_ || external_ != nullptr) thread_ = std::jthread([this](std::stop_token st) { watch(st); });
    }
    ~StopWatcher() {
        if (thread_.joinable()) {
            thread_.request_stop();
            thread_.join();
        }
        if (tty_) ::tcsetattr(STDIN_FILENO, TCSANOW, &saved_);
    }
    StopWatcher(const StopWatcher&) = delete;
    StopWatcher& operator=(const StopWatcher&) = delete;

    const std::atomic<bool>* flag() const { return &stop_; }

private:
    void watch(const std::stop_token& st) {
        while (!st.stop_requested() && !stop_) {
            if (external_ != nullptr && external_->load()) break;
            if (tty_) {
                pollfd pfd{STDIN_FILENO, POLLIN, 0};
                if (::poll(&pfd, 1, 50) > 0) {
                    char c = 0;
                    if (::read(STDIN_FILENO, &c, 1) == 1 && (c == 'q' || c == 'Q')) break;
                }
            } else {
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
        }
        if (!st.stop_requested()) {
            spdlog::info("stop requested");
            stop_ = true;
        }
    }

    const std::atomic<bool>* external_;
    std::atomic<bool> stop_{false};
    bool tty_ = false;
    termios saved_{};
    std::jthread thread_;
};

Nanos seconds_to_nanos(double s, const char* what) {
    if (!(s > 0) || !std::isfinite(s)) throw Error(fmt::format("{} must be positive", what));
    return static_cast<Nanos>(std::llround(s * 1e9));
}

std::vector<SourcePtr> open_sources(const fs::path& streams, std::optional<std::uint64_t> seed, Nanos duration) {
    auto configs = load_source_configs(streams);
    std::vector<SourcePtr> sources;
    for (auto& c : configs) {
        if (seed) c.seed = mix_seed(*seed, c.seed);
        sources.push_back(open_synthetic_source(c, SourceWindow{kRecordEpoch, duration}));
    }
    return sources;
}

void emit_report(const std::optional<fs::path>& path, const json& report, std::ostream& out) {
    if (path)
        write_file_atomic(*path, report.dump(2) + "\n");
    else
        out << report.dump(2) << '\n';
}

std::string frame_file(std::size_t idx, const char* ext) { return fmt::format("{:06d}.{}", idx, ext); }

void require_view(const RunManifest& m, const std::string& view) {
    for (const auto& d : m.streams)
        if (d.is_image() && d.view_name() == view) return;
    throw Error(fmt::format("run '{}' has no '{}' view", m.run_id, view));
}

ImageFrame as_gray(const ImageFrame& img) {
    if (img.channels() == 1) return img;
    if (img.channels() == 3) return post::to_grayscale(img);
    throw Error(fmt::format("unsupported channel count {}", img.channels()));
}

json summary(const RunManifest& m, const fs::path& dir) {
    return {{"run_dir", dir.string()},     {"run_id", m.run_id},           {"recorder_mode", to_string(m.recorder_mode)},
            {"packet_count", m.packet_count}, {"reject_count", m.reject_count}, {"drop_count", m.drop_count},
            {"late_count", m.late_count}, {"dirty", m.dirty},             {"warnings", m.warnings}};
}

}  // namespace

int run_record_online(const RecordOnlineArgs& a, std::ostream& out, const std::atomic<bool>* stop) {
    const Nanos duration = seconds_to_nanos(a.duration_s, "--duration-s");
    online::OnlineRunOptions opts;
    opts.sync.tolerance_ms = a.tolerance_ms;
    opts.sync.writer_pool_size = a.writers;
    opts.sync.synced_queue_capacity = a.queue_cap;
    opts.sync.per_stream_buffer_capacity = a.buffer_cap;
    opts.sync.reference_stream = a.reference;
    opts.sync.validate();
    opts.out_root = a.out;
    opts.run_id = a.run_id;
    opts.epoch = kRecordEpoch;
    opts.speed = a.speed;
    opts.duration = duration;
    opts.raw_tee = a.raw_tee;

    auto sources = open_sources(a.streams, a.seed, duration);
    StopWatcher watcher(stop);
    opts.stop = watcher.flag();
    auto result = online::record_online(std::move(sources), opts);

    json s = summary(result.manifest, result.run_dir);
    s["incomplete_removed"] = result.incomplete_removed;
    s["write_failures"] = result.write_failures;
    if (result.raw_dir) s["raw_dir"] = result.raw_dir->string();
    out << s.dump(2) << '\n';
    return 0;
}

int run_record_offline(const RecordOfflineArgs& a, std::ostream& out, const std::atomic<bool>* stop) {
    const Nanos duration = seconds_to_nanos(a.duration_s, "--duration-s");
    offline::OfflineCaptureOptions opts;
    opts.fps = a.fps;
    opts.run_id = a.run_id.empty() ? make_run_id() : a.run_id;
    opts.epoch = kRecordEpoch;
    opts.speed = a.speed;
    opts.duration = duration;

    auto sources = open_sources(a.streams, a.seed, duration);
    StopWatcher watcher(stop);
    opts.stop = watcher.flag();
    const fs::path dir = a.out / ("capture_" + opts.run_id);
    auto run = offline::record_offline(std::move(sources), dir, opts);
    offline::decouple_and_convert(run);

    json s{{"capture_dir", dir.string()}, {"run_id", run.run_id}, {"fps", run.fps}, {"t_end", run.t_end.nanos}};
    for (const auto& d : run.streams)
        if (d.is_image()) s["frames"][d.view_name()] = read_frame_stamps(run.frames_dir(d.view_name())).size();
    out << s.dump(2) << '\n';
    return 0;
}

int run_match(const MatchArgs& a, std::ostream& out) {
    auto run = read_offline_layout(a.run);
    SyncConfig cfg;
    cfg.reference_stream = a.reference;
    const fs::path dir = a.out / layout::run_dir_name(run.run_id);
    auto m = offline::match_offline(run, cfg, offline::interpolation_rule_from_string(a.rule), dir);
    out << summary(m, dir).dump(2) << '\n';
    return 0;
}

int run_analyze_latency(const LatencyArgs& a, std::ostream& out) {
    auto report = analysis::latency_stats(a.run, a.reference, a.bin_ms);
    emit_report(a.out, report, out);
    return 0;
}

int run_reproject(const ReprojectArgs& a, std::ostream& out) {
    if (a.sigma.size() != 2 || !(a.sigma[0] > 0) || !(a.sigma[1] > 0))
        throw Error("--sigma takes two positive values");
    const auto handeye = post::load_rigid_transform(a.handeye);
    const auto K = post::load_intrinsics(a.intrinsics);
    const RunManifest m = read_manifest(a.run);
    require_view(m, a.view);

    const StreamDescriptor* pos = nullptr;
    if (!a.stream.empty()) {
        pos = m.find_stream(a.stream);
        if (pos == nullptr) throw Error(fmt::format("run has no stream '{}'", a.stream));
    } else {
        for (const auto& d : m.streams)
            if (d.is_numeric() && !d.is_latched() && d.pose) {
                pos = &d;
                break;
            }
        if (pos == nullptr) throw Error("run has no pose stream; pass --stream");
    }
    if (!pos->is_numeric() || pos->arity < 3) throw Error(fmt::format("stream '{}' has no 3D position", pos->stream_id));

    const auto records = read_records(layout::records_path(a.run, pos->stream_id));
    if (records.size() != m.packet_count) throw Error("records do not match the packet count");
    fs::create_directories(a.out / "attention");
    if (a.heatmaps) fs::create_directories(a.out / "heatmaps");

    std::string lines;
    std::size_t visible = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& v = records[i].values;
        json line{{"index", i}, {"stamp", records[i].stamp.nanos}};
        post::PixelCoord px;
        try {
            px = post::project_point(post::Point3(v[0], v[1], v[2]), handeye, K);
        } catch (const Error&) {
            line["u"] = nullptr;
            line["v"] = nullptr;
            lines += line.dump() + "\n";
            continue;
        }
        line["u"] = px.u;
        line["v"] = px.v;
        lines += line.dump() + "\n";
        ++visible;

        const ImageFrame gray = as_gray(read_png(layout::frame_path(a.run, a.view, i)));
        const auto G = post::gaussian_heatmap(gray.width(), gray.height(), {px.u, px.v, a.sigma[0], a.sigma[1]});
        write_png(a.out / "attention" / frame_file(i, "png"), post::attention_image(gray, G));
        if (a.heatmaps) write_png(a.out / "heatmaps" / frame_file(i, "png"), post::heatmap_to_image(G));
    }
    write_file_atomic(a.out / "projections.jsonl", lines);
    out << json{{"frames", records.size()}, {"projected", visible}, {"out", a.out.string()}}.dump(2) << '\n';
    return 0;
}

int run_depth(const DepthArgs& a, std::ostream& out) {
    const auto sp = post::load_stereo_params(a.stereo);
    const RunManifest m = read_manifest(a.run);
    fs::create_directories(a.out);
    std::size_t converted = 0, missing = 0, valid = 0, invalid = 0;
    json stamps = json::array();
    for (std::size_t i = 0; i < m.ref_stamps.size(); ++i) {
        const auto src = a.disparity / frame_file(i, "pfm");
        if (!fs::exists(src)) {
            ++missing;
            continue;
        }
        const auto depth = post::disparity_to_depth(post::read_pfm(src), sp);
        for (double d : depth.data) (post::is_valid_depth(d) ? valid : invalid)++;
        post::write_pfm(a.out / frame_file(i, "pfm"), depth);
        stamps.push_back({{"index", i}, {"stamp", m.ref_stamps[i].nanos}});
        ++converted;
    }
    write_file_atomic(a.out / "stamps.json", stamps.dump() + "\n");
    out << json{{"converted", converted}, {"missing", missing}, {"valid_pixels", valid}, {"invalid_pixels", invalid}}
               .dump(2)
        << '\n';
    return 0;
}

int run_sharpness(const SharpnessArgs& a, std::ostream& out) {
    const RunManifest m = read_manifest(a.run);
    require_view(m, a.view);
    json frames = json::array();
    double sum = 0;
    for (std::size_t i = 0; i < m.ref_stamps.size(); ++i) {
        const double v = post::laplacian_variance(as_gray(read_png(layout::frame_path(a.run, a.view, i))));
        sum += v;
        frames.push_back({{"index", i}, {"stamp", m.ref_stamps[i].nanos}, {"laplacian_variance", v}});
    }
    json report{{"run_id", m.run_id}, {"view", a.view}, {"frames", frames}};
    report["mean"] = frames.empty() ? json(nullptr) : json(sum / static_cast<double>(frames.size()));
    emit_report(a.out, report, out);
    return 0;
}

int run_flow_filter(const FlowFilterArgs& a, std::ostream& out) {
    if (!(a.tau >= 0) || !std::isfinite(a.tau)) throw Error("--tau must be finite and nonnegative");
    std::vector<std::pair<fs::path, fs::path>> jobs;
    if (fs::is_directory(a.input)) {
        fs::create_directories(a.output);
        for (const auto& e : fs::directory_iterator(a.input))
            if (e.is_regular_file() && e.path().extension() == ".flo")
                jobs.emplace_back(e.path(), a.output / e.path().filename());
        std::sort(jobs.begin(), jobs.end());
    } else {
        if (!fs::exists(a.input)) throw IoError(fmt::format("{} does not exist", a.input.string()));
        if (a.output.has_parent_path()) fs::create_directories(a.output.parent_path());
        jobs.emplace_back(a.input, a.output);
    }
    std::size_t zeroed = 0, total = 0;
    for (const auto& [src, dst] : jobs) {
        const auto flow = post::read_flo(src);
        const auto filtered = post::flow_magnitude_filter(flow, a.tau);
        for (std::size_t k = 0; k + 1 < filtered.data.size(); k += 2) {
            ++total;
            zeroed += filtered.data[k] == 0 && filtered.data[k + 1] == 0 && (flow.data[k] != 0 || flow.data[k + 1] != 0);
        }
        post::write_flo(dst, filtered);
    }
    out << json{{"files", jobs.size()}, {"vectors", total}, {"zeroed", zeroed}}.dump(2) << '\n';
    return 0;
}

int run_contact_eval(const ContactEvalArgs& a, std::ostream& out) {
    const RunManifest m = read_manifest(a.run);
    const StreamDescriptor* s = nullptr;
    if (!a.stream.empty()) {
        s = m.find_stream(a.stream);
        if (s == nullptr || !s->is_numeric()) throw Error(fmt::format("run has no numeric stream '{}'", a.stream));
    } else {
        for (const auto& d : m.streams)
            if (d.is_latched()) {
                s = &d;
                break;
            }
        if (s == nullptr) throw Error("run has no latched stream; pass --stream");
    }
    const std::string arm = a.arm.empty() ? s->stream_id : a.arm;
    const AnnotationSet ann = read_annotations(a.run);
    if (!ann.contact.contains(arm)) throw Error(fmt::format("no contact annotations for arm '{}'", arm));

    std::vector<std::pair<Timestamp, double>> raw;
    for (const auto& r : read_records(layout::records_path(a.run, s->stream_id))) {
        if (r.values.empty()) throw Error(fmt::format("stream '{}' has empty records", s->stream_id));
        raw.emplace_back(r.stamp, r.values[0]);
    }
    const auto binary = post::binarize_contact(raw, {a.threshold, a.hysteresis});
    std::vector<bool> pred, gt;
    for (const auto& [t, c] : binary) {
        pred.push_back(c);
        gt.push_back(contact_at(ann, arm, t));
    }
    json report{{"stream", s->stream_id},
                {"arm", arm},
                {"threshold", a.threshold},
                {"hysteresis", a.hysteresis},
                {"count", pred.size()},
                {"transitions", post::count_transitions(binary)},
                {"accuracy", post::contact_accuracy(pred, gt)}};
    emit_report(a.out, report, out);
    return 0;
}

int run_validate(const fs::path& run, std::ostream& out) {
    const auto violations = validate_run(run);
    for (const auto& v : violations) out << v << '\n';
    if (violations.empty()) {
        out << "ok\n";
        return 0;
    }
    out << violations.size() << " violation(s)\n";
    return 1;
}

int run_serve(const ServeArgs& a, std::ostream& out, const std::atomic<bool>* stop) {
    service::AnnotationService svc({a.root, a.static_dir, "*"});
    const int port = svc.bind(a.host, a.port);
    out << fmt::format("listening on http://{}:{}/", a.host, port) << std::endl;
    std::exception_ptr failure;
    std::thread server([&svc, &failure] {
        try {
            svc.listen();
        } catch (...) {
            failure = std::current_exception();
        }
    });
    StopWatcher watcher(stop);
    while (!watcher.flag()->load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    svc.stop();
    server.join();
    if (failure) std::rethrow_exception(failure);
    return 0;
}

}  // namespace surgsync::cli
