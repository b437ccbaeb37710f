#include "surgsync/dataset/reformat.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/json_io.hpp"
#include "surgsync/core/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace surgsync {

std::string encode_packet_record(const SyncedPacket& p) {
    nlohmann::json j;
    j["ref_stamp"] = p.ref_stamp.nanos;
    auto images = nlohmann::json::array();
    for (const auto& im : p.images)
        images.push_back({{"stream_id", im.stream_id}, {"view", im.view}, {"stamp", im.stamp.nanos}});
    j["images"] = std::move(images);
    auto matched = nlohmann::json::array();
    for (const auto& [id, m] : p.matched)
        matched.push_back({{"stream_id", id},
                           {"values", encode_values(m.values)},
                           {"stamp", m.stamp.nanos},
                           {"delta_t", m.delta_t}});
    j["matched"] = std::move(matched);
    auto latched = nlohmann::json::array();
    for (const auto& [id, l] : p.latched)
        latched.push_back({{"stream_id", id},
                           {"values", encode_values(l.values)},
                           {"stamp", l.stamp ? nlohmann::json(l.stamp->nanos) : nlohmann::json(nullptr)}});
    j["latched"] = std::move(latched);
    return j.dump(1);
}

SyncedPacket decode_packet_record(const std::string& text) {
    SyncedPacket p;
    try {
        auto j = nlohmann::json::parse(text);
        p.ref_stamp = Timestamp{j.at("ref_stamp").get<std::int64_t>()};
        for (const auto& im : j.at("images"))
            p.images.push_back({im.at("stream_id").get<std::string>(), im.at("view").get<std::string>(), {},
                                Timestamp{im.at("stamp").get<std::int64_t>()}});
        for (const auto& m : j.at("matched"))
            p.matched[m.at("stream_id").get<std::string>()] =
                NumericMatch{decode_values(m.at("values")), Timestamp{m.at("stamp").get<std::int64_t>()},
                             m.at("delta_t").get<Nanos>()};
        for (const auto& l : j.at("latched")) {
            LatchedValue v{decode_values(l.at("values")), std::nullopt};
            if (!l.at("stamp").is_null()) v.stamp = Timestamp{l["stamp"].get<std::int64_t>()};
            p.latched[l.at("stream_id").get<std::string>()] = std::move(v);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("malformed packet record: {}", e.what()));
    }
    return p;
}

std::vector<std::string> required_packet_files(const std::vector<StreamDescriptor>& streams) {
    std::vector<std::string> files;
    for (const auto& d : streams)
        if (d.is_image()) files.push_back(d.view_name() + ".png");
    files.emplace_back(kPacketRecordFile);
    return files;
}

bool is_packet_folder_name(const std::string& name) {
    return name.size() == 19 && std::all_of(name.begin(), name.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool packet_folder_complete(const fs::path& folder, const std::vector<StreamDescriptor>& streams) {
    std::error_code ec;
    for (const auto& f : required_packet_files(streams))
        if (!fs::is_regular_file(folder / f, ec)) return false;
    return true;
}

namespace {

std::vector<fs::path> packet_folders(const fs::path& temp_root) {
    std::vector<fs::path> out;
    std::error_code ec;
    if (!fs::exists(temp_root, ec)) return out;
    for (const auto& e : fs::directory_iterator(temp_root)) {
        if (e.is_directory() && is_packet_folder_name(e.path().filename().string())) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::size_t remove_incomplete_folders(const fs::path& temp_root, const std::vector<StreamDescriptor>& streams) {
    std::size_t removed = 0;
    for (const auto& f : packet_folders(temp_root)) {
        if (!packet_folder_complete(f, streams)) {
            std::error_code ec;
            fs::remove_all(f, ec);
            if (ec) throw IoError(fmt::format("cannot remove {}: {}", f.string(), ec.message()));
            ++removed;
        }
    }
    return removed;
}

RunManifest reformat_data_storage(const fs::path& temp_root, const fs::path& out, RunManifest base) {
    auto folders = packet_folders(temp_root);
    for (const auto& f : folders)
        if (!packet_folder_complete(f, base.streams))
            throw Error(fmt::format("incomplete packet folder {}", f.string()));

    std::error_code ec;
    if (fs::exists(out, ec) && !fs::is_empty(out, ec))
        throw IoError(fmt::format("output run directory {} is not empty", out.string()));

    try {
        fs::create_directories(out / layout::kKinematics);
        fs::create_directories(out / layout::kAnnotations);
        for (const auto& d : base.streams)
            if (d.is_image()) fs::create_directories(out / layout::kFrames / d.view_name());

        std::map<std::string, std::ofstream> records;
        for (const auto& d : base.streams) {
            if (!d.is_numeric()) continue;
            auto path = layout::records_path(out, d.stream_id);
            records[d.stream_id].open(path, std::ios::trunc);
            if (!records[d.stream_id]) throw IoError(fmt::format("cannot create {}", path.string()));
        }

        base.ref_stamps.clear();
        for (std::size_t idx = 0; idx < folders.size(); ++idx) {
            const auto& folder = folders[idx];
            auto bytes = read_file_bytes(folder / kPacketRecordFile);
            SyncedPacket p = decode_packet_record(std::string(bytes.begin(), bytes.end()));
            if (folder_name(p.ref_stamp) != folder.filename().string())
                throw Error(fmt::format("{}: ref_stamp {} does not match folder name", folder.string(), p.ref_stamp.nanos));
            if (!base.ref_stamps.empty() && !(base.ref_stamps.back() < p.ref_stamp))
                throw Error(fmt::format("{}: duplicate reference stamp", folder.string()));
            base.ref_stamps.push_back(p.ref_stamp);

            for (const auto& d : base.streams) {
                if (d.is_image()) {
                    fs::copy_file(folder / (d.view_name() + ".png"), layout::frame_path(out, d.view_name(), idx),
                                  fs::copy_options::overwrite_existing);
                    continue;
                }
                RecordLine line{p.ref_stamp, std::nullopt, {}};
                if (d.is_latched()) {
                    auto it = p.latched.find(d.stream_id);
                    if (it == p.latched.end())
                        throw Error(fmt::format("{}: no value for latched stream '{}'", folder.string(), d.stream_id));
                    line.values = it->second.values;
                    if (it->second.stamp) line.delta_t = *it->second.stamp - p.ref_stamp;
                } else {
                    auto it = p.matched.find(d.stream_id);
                    if (it == p.matched.end())
                        throw Error(fmt::format("{}: no match for stream '{}'", folder.string(), d.stream_id));
                    line.values = it->second.values;
                    line.delta_t = it->second.delta_t;
                }
                auto& os = records[d.stream_id];
                os << encode_record_line(line) << '\n';
                if (!os) throw IoError(fmt::format("write failed for records of '{}'", d.stream_id));
            }
        }
        for (auto& [id, os] : records) {
            os.close();
            if (!os) throw IoError(fmt::format("close failed for records of '{}'", id));
        }
        base.packet_count = folders.size();
        write_manifest(out, base);
    } catch (const fs::filesystem_error& e) {
        fs::remove_all(out, ec);
        throw IoError(fmt::format("reformat failed: {}", e.what()));
    } catch (...) {
        fs::remove_all(out, ec);
        throw;
    }

    fs::remove_all(temp_root, ec);
    if (ec) throw IoError(fmt::format("cannot remove temp tree {}: {}", temp_root.string(), ec.message()));
    return base;
}

std::vector<std::string> validate_run(const fs::path& run_dir) {
    std::error_code ec;
    if (!fs::is_directory(run_dir, ec)) throw IoError(fmt::format("{} is not a readable directory", run_dir.string()));

    std::vector<std::string> v;
    RunManifest m;
    try {
        m = read_manifest(run_dir);
    } catch (const std::exception& e) {
        v.push_back(fmt::format("manifest: {}", e.what()));
        return v;
    }

    const std::size_t n = m.packet_count;
    if (m.ref_stamps.size() != n)
        v.push_back(fmt::format("manifest: packet_count {} but {} ref_stamps", n, m.ref_stamps.size()));
    for (std::size_t i = 1; i < m.ref_stamps.size(); ++i)
        if (!(m.ref_stamps[i - 1] < m.ref_stamps[i]))
            v.push_back(fmt::format("ref_stamps not strictly increasing at index {}", i));

    const Nanos tol = m.sync.tolerance_ns();
    for (const auto& d : m.streams) {
        if (d.is_image()) {
            auto dir = run_dir / layout::kFrames / d.view_name();
            std::size_t count = 0;
            if (fs::is_directory(dir, ec))
                for (const auto& e : fs::directory_iterator(dir))
                    if (e.path().extension() == ".png") ++count;
            if (count != n)
                v.push_back(fmt::format("frames/{}: {} frames, packet_count {}", d.view_name(), count, n));
            for (std::size_t i = 0; i < n; ++i)
                if (!fs::is_regular_file(layout::frame_path(run_dir, d.view_name(), i), ec)) {
                    v.push_back(fmt::format("frames/{}: missing index {}", d.view_name(), i));
                    break;
                }
            continue;
        }
        auto path = layout::records_path(run_dir, d.stream_id);
        std::vector<RecordLine> lines;
        try {
            lines = read_records(path);
        } catch (const std::exception& e) {
            v.push_back(fmt::format("{}: {}", d.stream_id, e.what()));
            continue;
        }
        if (lines.size() != n)
            v.push_back(fmt::format("{}: {} record lines, packet_count {}", d.stream_id, lines.size(), n));
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const auto& r = lines[i];
            if (static_cast<int>(r.values.size()) != d.arity) {
                v.push_back(fmt::format("{}: line {} has {} values, arity {}", d.stream_id, i, r.values.size(), d.arity));
                break;
            }
            if (i < m.ref_stamps.size() && r.stamp != m.ref_stamps[i]) {
                v.push_back(fmt::format("{}: line {} stamp {} != ref_stamp {}", d.stream_id, i, r.stamp.nanos,
                                        m.ref_stamps[i].nanos));
                break;
            }
            if (d.is_latched()) {
                if (r.delta_t && *r.delta_t > 0)
                    v.push_back(fmt::format("{}: line {} latched sample after reference", d.stream_id, i));
                continue;
            }
            if (!r.delta_t) {
                v.push_back(fmt::format("{}: line {} missing delta_t", d.stream_id, i));
                continue;
            }
            if (m.recorder_mode == RecorderMode::online && (*r.delta_t > tol || *r.delta_t < -tol))
                v.push_back(fmt::format("{}: line {} |delta_t| {} ns exceeds tolerance {} ns", d.stream_id, i,
                                        *r.delta_t, tol));
        }
    }

    if (m.recorder_mode == RecorderMode::offline_matched) {
        if (!m.fps || !(*m.fps > 0)) {
            v.push_back("offline run without fps");
        } else {
            const double period = 1e9 / *m.fps;
            for (std::size_t i = 1; i < m.ref_stamps.size(); ++i) {
                double gap = static_cast<double>(m.ref_stamps[i] - m.ref_stamps[i - 1]);
                if (std::abs(gap - period) > 1.0)
                    v.push_back(fmt::format("frame spacing {} ns at index {} deviates from period {} ns", gap, i, period));
            }
        }
    }
    return v;
}

}  // namespace surgsync
