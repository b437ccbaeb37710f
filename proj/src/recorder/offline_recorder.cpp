#include "surgsync/recorder/offline_recorder.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/png_io.hpp"
#include "surgsync/core/run_clock.hpp"
#include "surgsync/dataset/kin_record.hpp"
#include "surgsync/dataset/reformat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace fs = std::filesystem;

namespace surgsync::offline {

Timestamp schedule_slot(Timestamp start, double fps, std::uint64_t i) {
    return start + static_cast<Nanos>(std::llround(static_cast<double>(i) * 1e9 / fps));
}

std::vector<Timestamp> schedule_frames(Timestamp start, double fps, Timestamp end) {
    if (!(fps > 0.0) || !std::isfinite(fps)) throw Error("fps must be positive");
    if (end < start) throw Error("schedule end precedes start");
    std::vector<Timestamp> out;
    for (std::uint64_t i = 0;; ++i) {
        Timestamp t = schedule_slot(start, fps, i);
        if (end < t) break;
        out.push_back(t);
    }
    return out;
}

namespace {

struct StreamSpan {
    std::optional<Timestamp> first, last;
    void see(Timestamp t) {
        if (!first) first = t;
        last = t;
    }
};

}  // namespace

OfflineRunLayout record_offline(std::vector<SourcePtr> sources, const fs::path& out,
                                const OfflineCaptureOptions& opts) {
    if (!(opts.fps > 0.0) || !std::isfinite(opts.fps)) throw Error("fps must be positive");
    std::error_code ec;
    if (fs::exists(out, ec) && !fs::is_empty(out, ec))
        throw IoError(fmt::format("output {} is not empty", out.string()));

    OfflineRunLayout run;
    run.root = out;
    run.run_id = opts.run_id.empty() ? make_run_id() : opts.run_id;
    run.fps = opts.fps;
    run.epoch = opts.epoch;
    bool has_image = false;
    for (const auto& s : sources) {
        run.streams.push_back(s->descriptor());
        has_image = has_image || s->descriptor().is_image();
    }
    if (!has_image) throw Error("offline recording needs a reference image stream");

    fs::create_directories(run.kin_dir());
    fs::create_directories(run.meta_dir());
    for (const auto& d : run.streams)
        if (d.is_image()) fs::create_directories(run.video_dir(d.view_name()));

    RunClock clock(opts.epoch, opts.speed);
    std::optional<Timestamp> t_end;
    if (opts.duration) t_end = opts.epoch + *opts.duration;

    std::atomic<bool> stop{false};
    std::mutex t_end_mu;
    auto current_end = [&]() -> std::optional<Timestamp> {
        std::lock_guard lock(t_end_mu);
        return t_end;
    };

    std::vector<StreamSpan> spans(sources.size());
    std::vector<std::string> errors(sources.size());
    std::vector<std::thread> workers;

    for (std::size_t i = 0; i < sources.size(); ++i) {
        workers.emplace_back([&, i] {
            auto& src = *sources[i];
            const auto& d = run.streams[i];
            try {
                if (!d.is_image()) {
                    KinBinWriter writer(run.kin_binary(d.stream_id), d.stream_id, d.arity);
                    while (auto s = src.next()) {
                        if (auto e = current_end(); e && *e < s->stamp) break;
                        if (!clock.sleep_until(s->stamp, &stop)) break;
                        writer.append(s->stamp, s->values());
                        spans[i].see(s->stamp);
                    }
                    writer.close();
                    return;
                }
                // Fixed-rate writer: waits only when ahead of schedule, then
                // holds the latest image stamped at or before the slot.
                const auto dir = run.video_dir(d.view_name());
                std::ofstream index(dir / "index.jsonl", std::ios::trunc);
                std::optional<Sample> pending = src.next();
                std::optional<Sample> latest;
                std::size_t written = 0;
                for (std::uint64_t k = 0;; ++k) {
                    Timestamp slot = schedule_slot(opts.epoch, opts.fps, k);
                    if (auto e = current_end(); e && *e < slot) break;
                    if (!clock.sleep_until(slot, &stop)) {
                        // Stopped while waiting: the cut-off is now known.
                        if (auto e = current_end(); !e || *e < slot) break;
                    }
                    while (pending && !(slot < pending->stamp)) {
                        latest = std::move(pending);
                        pending = src.next();
                    }
                    // Source exhausted and no cut-off to hold the last image until.
                    const bool exhausted = !pending && !current_end();
                    if (!latest) {
                        if (exhausted) break;
                        continue;
                    }
                    write_png(dir / fmt::format("{:06d}.png", written), latest->image());
                    index << nlohmann::json{{"index", written}, {"stamp", slot.nanos},
                                            {"source_stamp", latest->stamp.nanos}}.dump()
                          << '\n';
                    if (!index) throw IoError(fmt::format("write failed for {}", (dir / "index.jsonl").string()));
                    ++written;
                    spans[i].see(slot);
                    if (exhausted) break;
                }
                index.close();
            } catch (const std::exception& e) {
                errors[i] = e.what();
                spdlog::error("offline capture '{}': {}", d.stream_id, e.what());
            }
        });
    }

    // Watch for the external stop while workers run.
    std::thread watcher([&] {
        for (;;) {
            if (stop.load()) return;
            if (opts.stop && opts.stop->load()) {
                {
                    std::lock_guard lock(t_end_mu);
                    Timestamp now = clock.now();
                    if (!t_end || now < *t_end) t_end = now;
                }
                stop = true;
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
    });
    for (auto& w : workers) w.join();
    stop = true;
    watcher.join();

    for (const auto& e : errors)
        if (!e.empty()) throw IoError("offline capture failed: " + e);

    Timestamp end = current_end().value_or(opts.epoch);
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (!spans[i].first) continue;
        run.start_times[run.streams[i].stream_id] = *spans[i].first;
        run.end_times[run.streams[i].stream_id] = *spans[i].last;
        if (end < *spans[i].last) end = *spans[i].last;
    }
    run.t_end = end;
    write_offline_meta(run);
    return run;
}

void decouple_and_convert(const OfflineRunLayout& run) {
    for (const auto& d : run.streams) {
        if (d.is_image()) {
            const auto src = run.video_dir(d.view_name());
            const auto dst = run.frames_dir(d.view_name());
            fs::create_directories(dst);
            auto index = read_frame_index(src);
            auto stamps = nlohmann::json::array();
            for (std::size_t i = 0; i < index.size(); ++i) {
                if (index[i].index != i)
                    throw CorruptFileError(fmt::format("{}: frame index gap at {}", src.string(), i), i);
                auto name = fmt::format("{:06d}.png", i);
                fs::copy_file(src / name, dst / name, fs::copy_options::overwrite_existing);
                stamps.push_back(index[i].stamp.nanos);
            }
            write_file_atomic(dst / "stamps.json", stamps.dump() + "\n");
        } else if (fs::exists(run.kin_binary(d.stream_id))) {
            convert_binary_to_readable(run.kin_binary(d.stream_id), run.kin_readable(d.stream_id));
        }
    }
}

RunManifest match_offline(const OfflineRunLayout& run, const SyncConfig& cfg, InterpolationRule rule,
                          const fs::path& out_run_dir) {
    const std::string ref_id = cfg.resolve_reference(run.streams);
    const StreamDescriptor& ref = *run.find_stream(ref_id);

    RunManifest m;
    m.run_id = run.run_id;
    m.recorder_mode = RecorderMode::offline_matched;
    m.created_at = wall_clock_iso8601();
    m.sync = cfg;
    m.sync.reference_stream = ref_id;
    m.fps = run.fps;
    m.interpolation = std::string(to_string(rule));
    m.t_end = run.t_end;

    if (!fs::exists(run.frames_dir(ref.view_name()) / "stamps.json"))
        throw Error("run has not been decoupled (frames/<view>/stamps.json missing)");

    // Slots present in every image view.
    std::map<std::string, std::map<Timestamp, std::size_t>> slot_index;
    for (const auto& d : run.streams) {
        if (!d.is_image()) continue;
        auto stamps = read_frame_stamps(run.frames_dir(d.view_name()));
        auto& idx = slot_index[d.stream_id];
        for (std::size_t i = 0; i < stamps.size(); ++i) idx[stamps[i]] = i;
    }
    std::vector<Timestamp> slots;
    for (const auto& [t, i] : slot_index[ref_id]) {
        bool everywhere = true;
        for (const auto& [id, idx] : slot_index) everywhere = everywhere && idx.count(t);
        if (everywhere) slots.push_back(t);
    }

    std::map<std::string, KinLog> logs;
    for (const auto& d : run.streams) {
        if (d.is_image()) {
            m.streams.push_back(d);
            continue;
        }
        auto path = run.kin_readable(d.stream_id);
        KinLog log;
        if (fs::exists(path)) log = read_kin_readable(path);
        if (log.records.empty()) {
            m.warnings.push_back(fmt::format("stream '{}' has no samples and was omitted", d.stream_id));
            continue;
        }
        m.streams.push_back(d);
        logs.emplace(d.stream_id, std::move(log));
    }

    const fs::path temp_root = out_run_dir.parent_path() / (".tmp_" + out_run_dir.filename().string());
    fs::remove_all(temp_root);
    fs::create_directories(temp_root);
    for (Timestamp slot : slots) {
        SyncedPacket p;
        p.ref_stamp = slot;
        const auto folder = temp_root / folder_name(slot);
        fs::create_directories(folder);
        for (const auto& d : m.streams) {
            if (d.is_image()) {
                std::size_t i = slot_index[d.stream_id].at(slot);
                fs::copy_file(run.frames_dir(d.view_name()) / fmt::format("{:06d}.png", i),
                              folder / (d.view_name() + ".png"));
                p.images.push_back({d.stream_id, d.view_name(), {}, slot});
                continue;
            }
            const auto& recs = logs.at(d.stream_id).records;
            if (d.is_latched()) {
                auto it = std::upper_bound(recs.begin(), recs.end(), slot,
                                           [](Timestamp t, const KinRecord& r) { return t < r.stamp; });
                LatchedValue v;
                if (it == recs.begin()) {
                    v.values = d.latched_default.empty() ? NumericVector(static_cast<std::size_t>(d.arity), 0.0)
                                                         : d.latched_default;
                } else {
                    v.values = std::prev(it)->values;
                    v.stamp = std::prev(it)->stamp;
                }
                p.latched.emplace(d.stream_id, std::move(v));
                continue;
            }
            auto r = interpolate(recs, slot, rule, d.pose);
            p.matched.emplace(d.stream_id, NumericMatch{std::move(r.values), r.stamp, r.stamp - slot});
        }
        write_file_atomic(folder / kPacketRecordFile, encode_packet_record(p));
    }
    return reformat_data_storage(temp_root, out_run_dir, std::move(m));
}

}  // namespace surgsync::offline
