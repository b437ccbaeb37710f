#include "surgsync/dataset/offline_layout.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/json_io.hpp"
#include "surgsync/core/png_io.hpp"

#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace surgsync {

const StreamDescriptor* OfflineRunLayout::find_stream(const std::string& id) const {
    for (const auto& d : streams)
        if (d.stream_id == id) return &d;
    return nullptr;
}

namespace {

nlohmann::json stamp_map(const std::map<std::string, Timestamp>& m) {
    auto j = nlohmann::json::object();
    for (const auto& [k, v] : m) j[k] = v.nanos;
    return j;
}

std::map<std::string, Timestamp> read_stamp_map(const fs::path& path) {
    std::map<std::string, Timestamp> out;
    if (!fs::exists(path)) return out;
    auto bytes = read_file_bytes(path);
    auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    for (const auto& [k, v] : j.items()) out[k] = Timestamp{v.get<std::int64_t>()};
    return out;
}

}  // namespace

void write_offline_meta(const OfflineRunLayout& run) {
    fs::create_directories(run.meta_dir());
    nlohmann::json meta{{"run_id", run.run_id},
                        {"streams", run.streams},
                        {"fps", run.fps},
                        {"epoch", run.epoch.nanos},
                        {"t_end", run.t_end.nanos}};
    write_file_atomic(run.meta_dir() / "run.json", meta.dump(2) + "\n");
    write_file_atomic(run.meta_dir() / "start_times.json", stamp_map(run.start_times).dump(2) + "\n");
    write_file_atomic(run.meta_dir() / "end_times.json", stamp_map(run.end_times).dump(2) + "\n");
}

bool is_offline_run(const fs::path& root) {
    std::error_code ec;
    return fs::is_regular_file(root / "meta" / "run.json", ec);
}

OfflineRunLayout read_offline_layout(const fs::path& root) {
    if (!is_offline_run(root)) throw IoError(fmt::format("{} is not an offline run (meta/run.json missing)", root.string()));
    OfflineRunLayout run;
    run.root = root;
    try {
        auto bytes = read_file_bytes(root / "meta" / "run.json");
        auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
        run.run_id = j.at("run_id").get<std::string>();
        run.streams = j.at("streams").get<std::vector<StreamDescriptor>>();
        run.fps = j.at("fps").get<double>();
        run.epoch = Timestamp{j.at("epoch").get<std::int64_t>()};
        run.t_end = Timestamp{j.at("t_end").get<std::int64_t>()};
        run.start_times = read_stamp_map(run.meta_dir() / "start_times.json");
        run.end_times = read_stamp_map(run.meta_dir() / "end_times.json");
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("{}: bad offline metadata: {}", root.string(), e.what()));
    }
    return run;
}

std::vector<FrameIndexEntry> read_frame_index(const fs::path& video_dir) {
    std::vector<FrameIndexEntry> out;
    auto path = video_dir / "index.jsonl";
    if (!fs::exists(path)) return out;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        out.push_back({j.at("index").get<std::size_t>(), Timestamp{j.at("stamp").get<std::int64_t>()},
                       Timestamp{j.at("source_stamp").get<std::int64_t>()}});
    }
    return out;
}

std::vector<Timestamp> read_frame_stamps(const fs::path& frames_dir) {
    auto bytes = read_file_bytes(frames_dir / "stamps.json");
    std::vector<Timestamp> out;
    for (const auto& v : nlohmann::json::parse(bytes.begin(), bytes.end())) out.push_back(Timestamp{v.get<std::int64_t>()});
    return out;
}

}  // namespace surgsync
