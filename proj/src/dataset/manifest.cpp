#include "surgsync/dataset/manifest.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/json_io.hpp"
#include "surgsync/core/png_io.hpp"

#include <chrono>
#include <fstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace surgsync {

std::string_view to_string(RecorderMode m) {
    return m == RecorderMode::online ? "online" : "offline_matched";
}

RecorderMode recorder_mode_from_string(std::string_view s) {
    if (s == "online") return RecorderMode::online;
    if (s == "offline_matched") return RecorderMode::offline_matched;
    throw Error(fmt::format("unknown recorder_mode '{}'", s));
}

namespace layout {

std::filesystem::path frame_path(const std::filesystem::path& run, const std::string& view, std::size_t idx) {
    return run / kFrames / view / fmt::format("{:06d}.png", idx);
}

std::filesystem::path records_path(const std::filesystem::path& run, const std::string& stream_id) {
    return run / kKinematics / (stream_id + ".records");
}

std::string run_dir_name(const std::string& run_id) { return "run_" + run_id; }

}  // namespace layout

const StreamDescriptor* RunManifest::find_stream(const std::string& id) const {
    for (const auto& d : streams)
        if (d.stream_id == id) return &d;
    return nullptr;
}

void to_json(nlohmann::json& j, const RunManifest& m) {
    auto stamps = nlohmann::json::array();
    for (auto t : m.ref_stamps) stamps.push_back(t.nanos);
    j = nlohmann::json{{"run_id", m.run_id},
                       {"recorder_mode", to_string(m.recorder_mode)},
                       {"created_at", m.created_at},
                       {"sync_config", m.sync},
                       {"streams", m.streams},
                       {"packet_count", m.packet_count},
                       {"reject_count", m.reject_count},
                       {"drop_count", m.drop_count},
                       {"late_count", m.late_count},
                       {"ref_stamps", std::move(stamps)},
                       {"calibration", m.calibration},
                       {"dirty", m.dirty},
                       {"warnings", m.warnings}};
    if (m.fps) j["fps"] = *m.fps;
    if (m.interpolation) j["interpolation"] = *m.interpolation;
    if (m.t_end) j["t_end"] = m.t_end->nanos;
}

void from_json(const nlohmann::json& j, RunManifest& m) {
    m = RunManifest{};
    m.run_id = j.at("run_id").get<std::string>();
    m.recorder_mode = recorder_mode_from_string(j.at("recorder_mode").get<std::string>());
    m.created_at = j.value("created_at", "");
    m.sync = j.at("sync_config").get<SyncConfig>();
    m.streams = j.at("streams").get<std::vector<StreamDescriptor>>();
    m.packet_count = j.at("packet_count").get<std::uint64_t>();
    m.reject_count = j.value("reject_count", std::uint64_t{0});
    m.drop_count = j.value("drop_count", std::uint64_t{0});
    m.late_count = j.value("late_count", std::uint64_t{0});
    for (const auto& t : j.at("ref_stamps")) m.ref_stamps.push_back(Timestamp{t.get<std::int64_t>()});
    if (j.contains("calibration")) m.calibration = j["calibration"].get<std::map<std::string, std::string>>();
    m.dirty = j.value("dirty", false);
    if (j.contains("warnings")) m.warnings = j["warnings"].get<std::vector<std::string>>();
    if (j.contains("fps")) m.fps = j["fps"].get<double>();
    if (j.contains("interpolation")) m.interpolation = j["interpolation"].get<std::string>();
    if (j.contains("t_end")) m.t_end = Timestamp{j["t_end"].get<std::int64_t>()};
}

RunManifest read_manifest(const std::filesystem::path& run_dir) {
    auto path = run_dir / layout::kManifest;
    auto bytes = read_file_bytes(path);
    try {
        return nlohmann::json::parse(bytes.begin(), bytes.end()).get<RunManifest>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m) {
    write_file_atomic(run_dir / layout::kManifest, nlohmann::json(m).dump(2) + "\n");
}

std::string encode_record_line(const RecordLine& r) {
    nlohmann::json j{{"stamp", r.stamp.nanos},
                     {"delta_t", r.delta_t ? nlohmann::json(*r.delta_t) : nlohmann::json(nullptr)},
                     {"values", encode_values(r.values)}};
    return j.dump();
}

RecordLine decode_record_line(const std::string& line) {
    auto j = nlohmann::json::parse(line);
    RecordLine r;
    r.stamp = Timestamp{j.at("stamp").get<std::int64_t>()};
    const auto& dt = j.at("delta_t");
    if (!dt.is_null()) r.delta_t = dt.get<Nanos>();
    r.values = decode_values(j.at("values"));
    return r;
}

std::vector<RecordLine> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
    std::vector<RecordLine> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(decode_record_line(line));
        } catch (const std::exception& e) {
            throw CorruptFileError(fmt::format("{} line {}: {}", path.string(), lineno, e.what()), lineno);
        }
    }
    return out;
}

std::string make_run_id() {
    auto now = std::chrono::system_clock::now();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    return fmt::format("{:%Y%m%d_%H%M%S}_{:03d}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)), ms);
}

std::string wall_clock_iso8601() {
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
}

}  // namespace surgsync
