#pragma once

#include "surgsync/core/source.hpp"
#include "surgsync/core/sync_config.hpp"
#include "surgsync/dataset/manifest.hpp"
#include "surgsync/recorder/online_recorder.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace surgsync::online {

struct OnlineRunOptions {
    SyncConfig sync;
    std::filesystem::path out_root;
    std::string run_id;       // empty: wall-clock id
    Timestamp epoch{0};       // run-clock origin; matches the sources' time base
    double speed = 1.0;       // stream seconds per wall second; 0 = unpaced
    std::optional<Nanos> duration;  // cut-off at epoch + duration
    bool raw_tee = false;     // also log every ingested sample under <out>/run_<id>.raw/
    std::chrono::milliseconds stall_timeout{1000};
    const std::atomic<bool>* stop = nullptr;  // external stop ('q' / SIGINT)
};

struct OnlineRunResult {
    RunManifest manifest;
    std::filesystem::path run_dir;
    std::optional<std::filesystem::path> raw_dir;
    RecorderStats stats;
    std::size_t incomplete_removed = 0;
    std::size_t write_failures = 0;
    std::size_t synced_queue_high_water = 0;
};

/// Runs producers, the sync loop and the writer pool until the sources end,
/// the duration elapses or `stop` is raised; then drains up to the cut-off,
/// removes incomplete packet folders and reformats into the final layout.
OnlineRunResult record_online(std::vector<SourcePtr> sources, const OnlineRunOptions& opts);

}  // namespace surgsync::online
