#pragma once

#include "surgsync/core/stream.hpp"
#include "surgsync/core/timestamp.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace surgsync {

// Stage-1 (capture) layout of an offline run:
//   <run_id>/kin/<topic>.sskb             binary kinematic logs
//   <run_id>/kin/<topic>.jsonl            readable logs (after decoupling)
//   <run_id>/video/<view>/<%06d>.png      paced frame store
//   <run_id>/video/<view>/index.jsonl     {"index","stamp","source_stamp"} per frame
//   <run_id>/frames/<view>/<%06d>.png     decoupled frames
//   <run_id>/frames/<view>/stamps.json    slot stamp per decoupled frame
//   <run_id>/meta/run.json                descriptors, fps, epoch, t_end
//   <run_id>/meta/start_times.json        stream_id -> first stamp (ns)
//   <run_id>/meta/end_times.json          stream_id -> last stamp (ns)
struct OfflineRunLayout {
    std::filesystem::path root;
    std::string run_id;
    std::vector<StreamDescriptor> streams;
    double fps = 10.0;
    Timestamp epoch;
    Timestamp t_end;
    std::map<std::string, Timestamp> start_times;
    std::map<std::string, Timestamp> end_times;

    std::filesystem::path kin_dir() const { return root / "kin"; }
    std::filesystem::path meta_dir() const { return root / "meta"; }
    std::filesystem::path video_dir(const std::string& view) const { return root / "video" / view; }
    std::filesystem::path frames_dir(const std::string& view) const { return root / "frames" / view; }
    std::filesystem::path kin_binary(const std::string& topic) const { return kin_dir() / (topic + ".sskb"); }
    std::filesystem::path kin_readable(const std::string& topic) const { return kin_dir() / (topic + ".jsonl"); }

    const StreamDescriptor* find_stream(const std::string& id) const;
};

void write_offline_meta(const OfflineRunLayout& run);
OfflineRunLayout read_offline_layout(const std::filesystem::path& root);
bool is_offline_run(const std::filesystem::path& root);

struct FrameIndexEntry {
    std::size_t index = 0;
    Timestamp stamp;         // schedule slot
    Timestamp source_stamp;  // stamp of the image held at that slot
};

std::vector<FrameIndexEntry> read_frame_index(const std::filesystem::path& video_dir);
std::vector<Timestamp> read_frame_stamps(const std::filesystem::path& frames_dir);

}  // namespace surgsync
