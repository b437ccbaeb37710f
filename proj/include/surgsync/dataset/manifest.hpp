#pragma once

#include "surgsync/core/stream.hpp"
#include "surgsync/core/sync_config.hpp"
#include "surgsync/core/timestamp.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace surgsync {

enum class RecorderMode { online, offline_matched };

std::string_view to_string(RecorderMode m);
RecorderMode recorder_mode_from_string(std::string_view s);

// Final run layout:
//   run_<id>/manifest.json
//            frames/<view>/<%06d>.png
//            kinematics/<stream>.records
//            annotations/annotations.json
//            calib/{intrinsics,stereo,handeye}.json   (optional)
namespace layout {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kFrames = "frames";
inline constexpr const char* kKinematics = "kinematics";
inline constexpr const char* kAnnotations = "annotations";
inline constexpr const char* kAnnotationsFile = "annotations.json";
inline constexpr const char* kCalib = "calib";

std::filesystem::path frame_path(const std::filesystem::path& run, const std::string& view, std::size_t idx);
std::filesystem::path records_path(const std::filesystem::path& run, const std::string& stream_id);
std::string run_dir_name(const std::string& run_id);
}  // namespace layout

struct RunManifest {
    std::string run_id;
    RecorderMode recorder_mode = RecorderMode::online;
    std::string created_at;  // wall clock, informational
    SyncConfig sync;
    std::vector<StreamDescriptor> streams;
    std::uint64_t packet_count = 0;
    std::uint64_t reject_count = 0;
    std::uint64_t drop_count = 0;
    std::uint64_t late_count = 0;
    std::vector<Timestamp> ref_stamps;
    std::map<std::string, std::string> calibration;  // name -> path relative to the run
    bool dirty = false;
    std::vector<std::string> warnings;

    // offline_matched only
    std::optional<double> fps;
    std::optional<std::string> interpolation;

    std::optional<Timestamp> t_end;

    const StreamDescriptor* find_stream(const std::string& id) const;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

RunManifest read_manifest(const std::filesystem::path& run_dir);
void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m);

/// One line of kinematics/<stream>.records. `stamp` is the packet's
/// reference stamp; the sample's own stamp is stamp + delta_t.
struct RecordLine {
    Timestamp stamp;
    std::optional<Nanos> delta_t;  // empty for a latched default
    std::vector<double> values;

    std::optional<Timestamp> sample_stamp() const {
        if (!delta_t) return std::nullopt;
        return stamp + *delta_t;
    }
};

std::string encode_record_line(const RecordLine& r);
RecordLine decode_record_line(const std::string& line);
std::vector<RecordLine> read_records(const std::filesystem::path& path);

/// UTC wall-clock run id, e.g. 20261016_171900_123.
std::string make_run_id();
std::string wall_clock_iso8601();

}  // namespace surgsync
