#include "surgsync/dataset/replay_source.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/png_io.hpp"
#include "surgsync/dataset/kin_record.hpp"
#include "surgsync/dataset/manifest.hpp"
#include "surgsync/dataset/offline_layout.hpp"

#include <fmt/format.h>

namespace fs = std::filesystem;

namespace surgsync {

namespace {

class FrameFileSource final : public SampleSource {
public:
    FrameFileSource(StreamDescriptor desc, std::vector<std::pair<fs::path, Timestamp>> frames)
        : desc_(std::move(desc)), frames_(std::move(frames)) {}

    const StreamDescriptor& descriptor() const override { return desc_; }

protected:
    std::optional<Sample> produce() override {
        if (pos_ >= frames_.size()) return std::nullopt;
        const auto& [path, stamp] = frames_[pos_++];
        return Sample{desc_.stream_id, stamp, read_png(path)};
    }

private:
    StreamDescriptor desc_;
    std::vector<std::pair<fs::path, Timestamp>> frames_;
    std::size_t pos_ = 0;
};

class RecordSource final : public SampleSource {
public:
    RecordSource(StreamDescriptor desc, std::vector<KinRecord> records)
        : desc_(std::move(desc)), records_(std::move(records)) {}

    const StreamDescriptor& descriptor() const override { return desc_; }

protected:
    std::optional<Sample> produce() override {
        if (pos_ >= records_.size()) return std::nullopt;
        auto& r = records_[pos_++];
        return Sample{desc_.stream_id, r.stamp, std::move(r.values)};
    }

private:
    StreamDescriptor desc_;
    std::vector<KinRecord> records_;
    std::size_t pos_ = 0;
};

SourcePtr replay_final(const fs::path& run_dir, const std::string& stream_id) {
    RunManifest m = read_manifest(run_dir);
    const StreamDescriptor* d = m.find_stream(stream_id);
    if (!d) throw Error(fmt::format("run {} has no stream '{}'", run_dir.string(), stream_id));
    if (d->is_image()) {
        std::vector<std::pair<fs::path, Timestamp>> frames;
        for (std::size_t i = 0; i < m.ref_stamps.size(); ++i)
            frames.emplace_back(layout::frame_path(run_dir, d->view_name(), i), m.ref_stamps[i]);
        return std::make_unique<FrameFileSource>(*d, std::move(frames));
    }
    std::vector<KinRecord> records;
    for (auto& line : read_records(layout::records_path(run_dir, stream_id))) {
        auto s = line.sample_stamp();
        if (!s) continue;
        if (!records.empty() && records.back().stamp == *s) continue;
        if (!records.empty() && *s < records.back().stamp)
            throw CorruptFileError(fmt::format("{}: sample stamps go backwards", stream_id), 0);
        records.push_back({*s, std::move(line.values)});
    }
    return std::make_unique<RecordSource>(*d, std::move(records));
}

SourcePtr replay_offline(const fs::path& run_dir, const std::string& stream_id) {
    OfflineRunLayout run = read_offline_layout(run_dir);
    const StreamDescriptor* d = run.find_stream(stream_id);
    if (!d) throw Error(fmt::format("run {} has no stream '{}'", run_dir.string(), stream_id));
    if (d->is_image()) {
        std::vector<std::pair<fs::path, Timestamp>> frames;
        auto frames_dir = run.frames_dir(d->view_name());
        if (fs::exists(frames_dir / "stamps.json")) {
            auto stamps = read_frame_stamps(frames_dir);
            for (std::size_t i = 0; i < stamps.size(); ++i)
                frames.emplace_back(frames_dir / fmt::format("{:06d}.png", i), stamps[i]);
        } else {
            for (const auto& e : read_frame_index(run.video_dir(d->view_name())))
                frames.emplace_back(run.video_dir(d->view_name()) / fmt::format("{:06d}.png", e.index), e.stamp);
        }
        return std::make_unique<FrameFileSource>(*d, std::move(frames));
    }
    if (fs::exists(run.kin_binary(stream_id))) return open_kin_file_source(run.kin_binary(stream_id), *d);
    if (fs::exists(run.kin_readable(stream_id))) return open_kin_file_source(run.kin_readable(stream_id), *d);
    throw Error(fmt::format("run {} has no kinematic log for '{}'", run_dir.string(), stream_id));
}

}  // namespace

SourcePtr open_kin_file_source(const fs::path& path, StreamDescriptor desc) {
    KinLog log = path.extension() == ".sskb" ? read_kin_binary(path) : read_kin_readable(path);
    if (log.arity != desc.arity)
        throw CorruptFileError(fmt::format("{}: arity {} but stream declares {}", path.string(), log.arity, desc.arity), 0);
    return std::make_unique<RecordSource>(std::move(desc), std::move(log.records));
}

SourcePtr open_replay_source(const fs::path& run_dir, const std::string& stream_id) {
    if (fs::exists(run_dir / layout::kManifest)) return replay_final(run_dir, stream_id);
    if (is_offline_run(run_dir)) return replay_offline(run_dir, stream_id);
    throw IoError(fmt::format("{} is not a recorded run", run_dir.string()));
}

}  // namespace surgsync
