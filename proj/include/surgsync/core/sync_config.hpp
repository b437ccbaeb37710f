#pragma once

#include "surgsync/core/stream.hpp"
#include "surgsync/core/timestamp.hpp"

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace surgsync {

struct SyncConfig {
    double tolerance_ms = 10.0;
    std::string reference_stream;  // empty: the image stream with view "left"
    int writer_pool_size = 4;
    int synced_queue_capacity = 64;
    int per_stream_buffer_capacity = 4096;

    Nanos tolerance_ns() const { return ms_to_nanos(tolerance_ms); }
    void validate() const;

    /// Resolves the reference stream id against the stream list; throws when
    /// it is missing or not an image stream.
    std::string resolve_reference(const std::vector<StreamDescriptor>& streams) const;
};

void to_json(nlohmann::json& j, const SyncConfig& c);
void from_json(const nlohmann::json& j, SyncConfig& c);

}  // namespace surgsync
