#pragma once

#include "surgsync/core/packet.hpp"
#include "surgsync/dataset/manifest.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace surgsync {

inline constexpr const char* kPacketRecordFile = "kin.json";

/// kin.json contents for one temp packet folder. Image pixels are not part of
/// the record; decoded packets carry empty frames.
std::string encode_packet_record(const SyncedPacket& p);
SyncedPacket decode_packet_record(const std::string& text);

/// Files every temp packet folder must contain: one <view>.png per image
/// stream plus kin.json.
std::vector<std::string> required_packet_files(const std::vector<StreamDescriptor>& streams);

bool is_packet_folder_name(const std::string& name);
bool packet_folder_complete(const std::filesystem::path& folder, const std::vector<StreamDescriptor>& streams);

/// Deletes temp folders missing a required file. Returns how many were removed.
std::size_t remove_incomplete_folders(const std::filesystem::path& temp_root,
                                      const std::vector<StreamDescriptor>& streams);

/// Turns complete temp packet folders into the final run layout under `out`.
/// `base` supplies identity, config and counters; packet_count and ref_stamps
/// are filled in here. Aborts without deleting anything if a folder is
/// incomplete; the temp tree is removed only on success.
RunManifest reformat_data_storage(const std::filesystem::path& temp_root, const std::filesystem::path& out,
                                  RunManifest base);

/// Empty list means the run is valid.
std::vector<std::string> validate_run(const std::filesystem::path& run_dir);

}  // namespace surgsync
