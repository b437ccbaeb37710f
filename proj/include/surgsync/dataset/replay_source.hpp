#pragma once

#include "surgsync/core/source.hpp"

#include <filesystem>
#include <string>

namespace surgsync {

/// Replays one stream of a stored run in stamp order. Works on final runs
/// (manifest.json) and on offline capture runs (meta/run.json); for the
/// latter, binary kinematic logs are preferred over readable ones. A sample
/// matched into several consecutive packets of a final run is yielded once.
SourcePtr open_replay_source(const std::filesystem::path& run_dir, const std::string& stream_id);

/// Replays a single kinematic log, binary (.sskb) or readable (.jsonl).
SourcePtr open_kin_file_source(const std::filesystem::path& path, StreamDescriptor desc);

}  // namespace surgsync
