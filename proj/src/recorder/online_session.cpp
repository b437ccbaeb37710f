#include "surgsync/recorder/online_session.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/run_clock.hpp"
#include "surgsync/dataset/kin_record.hpp"
#include "surgsync/dataset/reformat.hpp"

#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace fs = std::filesystem;

namespace surgsync::online {

namespace {

/// Per-stream raw log: binary kinematic records, or one stamp per line for
/// image streams.
class RawTee {
public:
    RawTee(const fs::path& dir, const StreamDescriptor& d) {
        if (d.is_image()) {
            stamps_.open(dir / (d.stream_id + ".stamps"), std::ios::trunc);
            if (!stamps_) throw IoError(fmt::format("cannot create raw stamp log for '{}'", d.stream_id));
        } else {
            kin_ = std::make_unique<KinBinWriter>(dir / (d.stream_id + ".sskb"), d.stream_id, d.arity);
        }
    }

    void log(const Sample& s) {
        if (kin_)
            kin_->append(s.stamp, s.values());
        else
            stamps_ << s.stamp.nanos << '\n';
    }

    void close() {
        if (kin_) kin_->close();
        if (stamps_.is_open()) stamps_.close();
    }

private:
    std::unique_ptr<KinBinWriter> kin_;
    std::ofstream stamps_;
};

}  // namespace

OnlineRunResult record_online(std::vector<SourcePtr> sources, const OnlineRunOptions& opts) {
    if (sources.empty()) throw Error("record_online needs at least one source");
    std::vector<StreamDescriptor> streams;
    for (const auto& s : sources) streams.push_back(s->descriptor());

    OnlineRecorder rec(streams, opts.sync);
    const std::string run_id = opts.run_id.empty() ? make_run_id() : opts.run_id;

    OnlineRunResult result;
    result.run_dir = opts.out_root / layout::run_dir_name(run_id);
    const fs::path temp_root = opts.out_root / (".tmp_" + layout::run_dir_name(run_id));
    std::error_code ec;
    if (fs::exists(result.run_dir, ec)) throw IoError(fmt::format("{} already exists", result.run_dir.string()));
    fs::create_directories(temp_root, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", temp_root.string(), ec.message()));

    std::vector<std::unique_ptr<RawTee>> tees(sources.size());
    if (opts.raw_tee) {
        result.raw_dir = opts.out_root / (layout::run_dir_name(run_id) + ".raw");
        fs::create_directories(*result.raw_dir);
        for (std::size_t i = 0; i < sources.size(); ++i)
            tees[i] = std::make_unique<RawTee>(*result.raw_dir, streams[i]);
    }

    RunClock clock(opts.epoch, opts.speed);
    std::optional<Timestamp> t_end;
    if (opts.duration) {
        t_end = opts.epoch + *opts.duration;
        rec.request_cutoff(*t_end);
    }

    std::atomic<bool> stop_ingest{false};
    std::mutex err_mu;
    std::vector<std::string> errors;
    auto record_error = [&](std::string msg) {
        std::lock_guard lock(err_mu);
        spdlog::error("{}", msg);
        errors.push_back(std::move(msg));
    };

    // Producers: deliver each sample when the run clock reaches its stamp,
    // publishing the horizon while they wait.
    std::vector<std::thread> producers;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        producers.emplace_back([&, i] {
            auto& src = *sources[i];
            const auto& id = streams[i].stream_id;
            try {
                while (auto s = src.next()) {
                    if (t_end && *t_end < s->stamp) break;
                    bool stopped = false;
                    while (!clock.sleep_until(s->stamp, &stop_ingest, std::chrono::milliseconds(2))) {
                        if (stop_ingest.load()) {
                            stopped = true;
                            break;
                        }
                        rec.advance_horizon(id, std::min(clock.now(), s->stamp - 1));
                    }
                    // Unpaced runs have no deadline, so a full buffer waits
                    // for the sync loop instead of evicting.
                    while (!clock.paced() && !stop_ingest.load() &&
                           !rec.wait_for_space(id, std::chrono::milliseconds(20))) {
                    }
                    if (stopped || stop_ingest.load()) break;
                    if (tees[i]) tees[i]->log(*s);
                    rec.push_sample(std::move(*s));
                }
            } catch (const std::exception& e) {
                record_error(fmt::format("producer '{}': {}", id, e.what()));
            }
            rec.mark_ended(id);
        });
    }

    // Writers
    std::atomic<std::size_t> write_failures{0};
    std::vector<std::thread> writers;
    for (int w = 0; w < opts.sync.writer_pool_size; ++w) {
        writers.emplace_back([&] {
            while (auto p = rec.synced_queue().pop_wait()) {
                try {
                    write_packet(*p, temp_root);
                } catch (const std::exception&) {
                    try {
                        write_packet(*p, temp_root);
                    } catch (const std::exception& e) {
                        ++write_failures;
                        spdlog::error("dropping packet {}: {}", p->ref_stamp.nanos, e.what());
                    }
                }
            }
        });
    }

    // Sync loop (this thread).
    const Nanos tol = opts.sync.tolerance_ns();
    const Nanos stall = static_cast<Nanos>(opts.stall_timeout.count()) * 1'000'000;
    for (;;) {
        if (opts.stop && opts.stop->load() && !stop_ingest.load()) {
            Timestamp now = clock.now();
            if (!t_end || now < *t_end) t_end = now;
            rec.request_cutoff(*t_end);
            stop_ingest = true;
        }
        bool force = false;
        if (clock.paced()) {
            if (auto r = rec.pending_reference()) {
                double wall_ns = static_cast<double>(stall) * clock.speed();
                force = clock.now() > *r + tol + static_cast<Nanos>(wall_ns);
            }
        }
        // Likewise an unpaced run waits for writers rather than dropping frames.
        while (!clock.paced() && rec.synced_queue().full())
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
        auto res = rec.sync_step(force);
        if (res == StepResult::finished) break;
        if (res == StepResult::idle || res == StepResult::not_ready)
            rec.wait_for_input(std::chrono::milliseconds(5));
    }
    stop_ingest = true;
    for (auto& t : producers) t.join();
    rec.synced_queue().close();
    for (auto& t : writers) t.join();
    for (auto& tee : tees)
        if (tee) tee->close();

    result.stats = rec.stats();
    result.write_failures = write_failures.load();
    result.synced_queue_high_water = rec.synced_queue().high_water();
    result.incomplete_removed = remove_incomplete_folders(temp_root, streams);

    RunManifest base;
    base.run_id = run_id;
    base.recorder_mode = RecorderMode::online;
    base.created_at = wall_clock_iso8601();
    base.sync = opts.sync;
    base.sync.reference_stream = rec.reference_stream();
    base.streams = streams;
    base.reject_count = result.stats.reject_count;
    base.drop_count = result.stats.drop_count;
    base.late_count = result.stats.late_count;
    base.t_end = t_end;
    base.dirty = result.write_failures > 0 || !errors.empty();
    base.warnings = errors;
    if (result.write_failures > 0)
        base.warnings.push_back(fmt::format("{} packets dropped after failed writes", result.write_failures));
    if (result.incomplete_removed > 0)
        base.warnings.push_back(fmt::format("{} incomplete packet folders removed", result.incomplete_removed));

    result.manifest = reformat_data_storage(temp_root, result.run_dir, std::move(base));
    return result;
}

}  // namespace surgsync::online
