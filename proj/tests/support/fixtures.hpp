#pragma once

#include "surgsync/core/stream.hpp"
#include "surgsync/core/synthetic_source.hpp"
#include "surgsync/dataset/manifest.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace surgsync::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

StreamDescriptor image_desc(const std::string& id, View view, double rate_hz, int w = 16, int h = 12);
StreamDescriptor numeric_desc(const std::string& id, double rate_hz, int arity = 1);
StreamDescriptor latched_desc(const std::string& id, double rate_hz, std::vector<double> def = {});

Sample numeric_sample(const std::string& id, Timestamp t, std::vector<double> v);
Sample image_sample(const StreamDescriptor& d, Timestamp t, std::uint8_t fill = 0);

SyntheticSourceConfig synth(StreamDescriptor d, std::uint64_t seed, double jitter_ms = 1.0, double drop = 0.0,
                            double offset_ms = 0.0);

/// Writes a final run directly (no recorder): one reference image stream
/// "cam_left", plus one numeric stream per entry of `delta_ms` whose record
/// i has delta_t = delta_ms[i] milliseconds. Reference stamps are
/// `ref_stamps`. `run_dir` must be named run_<id>.
RunManifest write_crafted_run(const std::filesystem::path& run_dir, const std::vector<Timestamp>& ref_stamps,
                              const std::map<std::string, std::vector<double>>& delta_ms,
                              RecorderMode mode = RecorderMode::online);

/// Relative path -> content for every file under `root`. JSON documents named
/// manifest.json / run.json drop their run_id and created_at fields, and the
/// run id is replaced by "<id>" in path components named <id>, run_<id> or
/// capture_<id>.
std::map<std::string, std::string> canonical_tree(const std::filesystem::path& root, const std::string& run_id);

}  // namespace surgsync::testing
