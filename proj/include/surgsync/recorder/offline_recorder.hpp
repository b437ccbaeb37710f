#pragma once

#include "surgsync/core/source.hpp"
#include "surgsync/core/sync_config.hpp"
#include "surgsync/dataset/manifest.hpp"
#include "surgsync/dataset/offline_layout.hpp"
#include "surgsync/recorder/interpolation.hpp"

#include <atomic>
#include <filesystem>
#include <optional>
#include <vector>

namespace surgsync::offline {

/// start + round(i * 1e9 / fps) for i = 0, 1, ... while <= end.
std::vector<Timestamp> schedule_frames(Timestamp start, double fps, Timestamp end);

/// i-th slot of the same schedule.
Timestamp schedule_slot(Timestamp start, double fps, std::uint64_t i);

struct OfflineCaptureOptions {
    double fps = 10.0;
    std::string run_id;       // empty: wall-clock id
    Timestamp epoch{0};       // first slot and run-clock origin
    double speed = 1.0;       // 0 = unpaced
    std::optional<Nanos> duration;
    const std::atomic<bool>* stop = nullptr;
};

/// Stage 1. Image streams are stored as PNG sequences paced at `fps` (each
/// slot holds the most recent image at or before it); every numeric sample
/// is appended verbatim to kin/<topic>.sskb. `out` must be empty or absent.
OfflineRunLayout record_offline(std::vector<SourcePtr> sources, const std::filesystem::path& out,
                                const OfflineCaptureOptions& opts);

/// Expands frame stores into frames/<view>/ and converts every binary log to
/// its readable form. Throws CorruptFileError (with byte offset) on a
/// truncated log.
void decouple_and_convert(const OfflineRunLayout& run);

/// Stage 2. For each stored frame slot, computes every numeric stream by
/// `rule` and writes a final run at `out_run_dir` with the same layout as the
/// online recorder. Streams without samples are omitted with a warning.
RunManifest match_offline(const OfflineRunLayout& run, const SyncConfig& cfg, InterpolationRule rule,
                          const std::filesystem::path& out_run_dir);

}  // namespace surgsync::offline
