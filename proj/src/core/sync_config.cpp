#include "surgsync/core/sync_config.hpp"

#include "surgsync/core/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace surgsync {

void SyncConfig::validate() const {
    if (!(tolerance_ms > 0.0) || !std::isfinite(tolerance_ms)) throw Error("tolerance_ms must be > 0");
    if (writer_pool_size < 1) throw Error("writer_pool_size must be >= 1");
    if (synced_queue_capacity < 1) throw Error("synced_queue_capacity must be >= 1");
    if (per_stream_buffer_capacity < 1) throw Error("per_stream_buffer_capacity must be >= 1");
}

std::string SyncConfig::resolve_reference(const std::vector<StreamDescriptor>& streams) const {
    for (const auto& d : streams) {
        if (reference_stream.empty() ? (d.is_image() && d.view == View::left)
                                     : d.stream_id == reference_stream) {
            if (!d.is_image())
                throw Error(fmt::format("reference stream '{}' is not an image stream", d.stream_id));
            return d.stream_id;
        }
    }
    if (reference_stream.empty()) throw Error("no left image stream to use as reference");
    throw Error(fmt::format("reference stream '{}' not found", reference_stream));
}

void to_json(nlohmann::json& j, const SyncConfig& c) {
    j = nlohmann::json{{"tolerance_ms", c.tolerance_ms},
                       {"reference_stream", c.reference_stream},
                       {"writer_pool_size", c.writer_pool_size},
                       {"synced_queue_capacity", c.synced_queue_capacity},
                       {"per_stream_buffer_capacity", c.per_stream_buffer_capacity}};
}

void from_json(const nlohmann::json& j, SyncConfig& c) {
    c = SyncConfig{};
    c.tolerance_ms = j.value("tolerance_ms", c.tolerance_ms);
    c.reference_stream = j.value("reference_stream", c.reference_stream);
    c.writer_pool_size = j.value("writer_pool_size", c.writer_pool_size);
    c.synced_queue_capacity = j.value("synced_queue_capacity", c.synced_queue_capacity);
    c.per_stream_buffer_capacity = j.value("per_stream_buffer_capacity", c.per_stream_buffer_capacity);
}

}  // namespace surgsync
