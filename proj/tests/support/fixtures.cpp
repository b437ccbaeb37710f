#include "fixtures.hpp"

#include "surgsync/core/png_io.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <unistd.h>

namespace fs = std::filesystem;

namespace surgsync::testing {

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() / fmt::format("surgsync_{}_{}_{}", tag, ::getpid(), counter++);
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

StreamDescriptor image_desc(const std::string& id, View view, double rate_hz, int w, int h) {
    StreamDescriptor d;
    d.stream_id = id;
    d.kind = StreamKind::image;
    d.nominal_rate_hz = rate_hz;
    d.arity = 0;
    d.view = view;
    d.width = w;
    d.height = h;
    return d;
}

StreamDescriptor numeric_desc(const std::string& id, double rate_hz, int arity) {
    StreamDescriptor d;
    d.stream_id = id;
    d.kind = StreamKind::numeric;
    d.nominal_rate_hz = rate_hz;
    d.arity = arity;
    return d;
}

StreamDescriptor latched_desc(const std::string& id, double rate_hz, std::vector<double> def) {
    StreamDescriptor d = numeric_desc(id, rate_hz, 1);
    d.kind = StreamKind::latched_numeric;
    d.latched_default = std::move(def);
    return d;
}

Sample numeric_sample(const std::string& id, Timestamp t, std::vector<double> v) {
    return Sample{id, t, std::move(v)};
}

Sample image_sample(const StreamDescriptor& d, Timestamp t, std::uint8_t fill) {
    ImageFrame img(d.width, d.height, d.channels);
    for (auto& b : img.data()) b = fill;
    return Sample{d.stream_id, t, std::move(img)};
}

SyntheticSourceConfig synth(StreamDescriptor d, std::uint64_t seed, double jitter_ms, double drop, double offset_ms) {
    SyntheticSourceConfig c;
    c.descriptor = std::move(d);
    c.seed = seed;
    c.jitter_std_ms = jitter_ms;
    c.drop_probability = drop;
    c.latency_offset_ms = offset_ms;
    return c;
}

RunManifest write_crafted_run(const fs::path& run_dir, const std::vector<Timestamp>& ref_stamps,
                              const std::map<std::string, std::vector<double>>& delta_ms, RecorderMode mode) {
    RunManifest m;
    m.run_id = run_dir.filename().string().substr(4);
    m.recorder_mode = mode;
    m.created_at = "1970-01-01T00:00:00Z";
    m.streams.push_back(image_desc("cam_left", View::left, 30, 4, 4));
    for (const auto& [id, _] : delta_ms) m.streams.push_back(numeric_desc(id, 1000, 1));
    m.packet_count = ref_stamps.size();
    m.ref_stamps = ref_stamps;
    if (mode == RecorderMode::offline_matched) {
        m.fps = 10;
        m.interpolation = "nearest";
    }

    fs::create_directories(run_dir / layout::kFrames / "left");
    fs::create_directories(run_dir / layout::kKinematics);
    fs::create_directories(run_dir / layout::kAnnotations);
    for (std::size_t i = 0; i < ref_stamps.size(); ++i) {
        ImageFrame img(4, 4, 3);
        img.data()[0] = static_cast<std::uint8_t>(i);
        write_png(layout::frame_path(run_dir, "left", i), img);
    }
    for (const auto& [id, deltas] : delta_ms) {
        std::ofstream os(layout::records_path(run_dir, id));
        for (std::size_t i = 0; i < ref_stamps.size(); ++i) {
            const double d = i < deltas.size() ? deltas[i] : 0.0;
            RecordLine line{ref_stamps[i], ms_to_nanos(d), {static_cast<double>(i)}};
            os << encode_record_line(line) << '\n';
        }
    }
    write_manifest(run_dir, m);
    return m;
}

std::map<std::string, std::string> canonical_tree(const fs::path& root, const std::string& run_id) {
    std::map<std::string, std::string> out;
    auto canon_path = [&](const fs::path& rel) {
        fs::path out;
        for (const auto& part : rel) {
            const auto name = part.string();
            if (name == run_id) out /= "<id>";
            else if (name == "run_" + run_id) out /= "run_<id>";
            else if (name == "capture_" + run_id) out /= "capture_<id>";
            else out /= part;
        }
        return out.generic_string();
    };
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), root);
        std::ifstream in(e.path(), std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const auto name = e.path().filename().string();
        if (name == "manifest.json" || name == "run.json") {
            auto j = nlohmann::json::parse(content);
            j.erase("run_id");
            j.erase("created_at");
            content = j.dump();
        }
        out[canon_path(rel)] = std::move(content);
    }
    return out;
}

}  // namespace surgsync::testing
