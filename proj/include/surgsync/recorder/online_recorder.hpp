#pragma once

#include "surgsync/core/packet.hpp"
#include "surgsync/core/sync_config.hpp"
#include "surgsync/recorder/bounded_queue.hpp"
#include "surgsync/recorder/stream_buffer.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace surgsync::online {

struct RecorderStats {
    std::uint64_t packet_count = 0;  // packets enqueued for writing
    std::uint64_t reject_count = 0;  // reference frames failing the tolerance gate
    std::uint64_t drop_count = 0;    // reference frames dropped on synced-queue overflow
    std::uint64_t late_count = 0;    // reference frames matched after a stall timeout
    std::uint64_t evicted_count = 0; // samples evicted from full stream buffers
    std::size_t max_buffer_fill = 0;
};

enum class StepResult {
    idle,       // no reference frame buffered
    not_ready,  // a matched stream may still deliver a closer sample
    emitted,
    rejected,
    dropped,
    finished,   // reference stream ended (or cut off) and fully consumed
};

/// Tolerance-gated matcher state. All methods are thread-safe; producers call
/// push_sample / advance_horizon / mark_ended, exactly one sync loop calls
/// sync_step, writers consume synced_queue().
class OnlineRecorder {
public:
    OnlineRecorder(std::vector<StreamDescriptor> streams, SyncConfig cfg);

    const SyncConfig& config() const { return cfg_; }
    const std::string& reference_stream() const { return ref_id_; }
    const std::vector<StreamDescriptor>& streams() const { return streams_; }

    /// Appends to the stream's buffer (evicting the oldest when full) and,
    /// for latched streams, updates the last-value slot. Throws Error on an
    /// unknown stream or a payload that does not match the descriptor.
    void push_sample(Sample s);

    /// Promise that no future sample of `stream_id` is stamped at or before `t`.
    void advance_horizon(const std::string& stream_id, Timestamp t);
    void mark_ended(const std::string& stream_id);

    /// Reference frames stamped after `t_end` are discarded, never matched.
    void request_cutoff(Timestamp t_end);
    std::optional<Timestamp> cutoff() const;

    /// One iteration of the sync loop; never blocks. With `force`, matching
    /// proceeds even if some stream has not yet covered the reference stamp.
    StepResult sync_step(bool force = false);

    /// Waits until producer activity or the timeout.
    void wait_for_input(std::chrono::milliseconds timeout);
    /// Waits until the stream's buffer has room or the timeout. Returns
    /// whether there is room. Used for backpressure when replaying unpaced.
    bool wait_for_space(const std::string& stream_id, std::chrono::milliseconds timeout);

    std::optional<Timestamp> pending_reference() const;

    BoundedQueue<SyncedPacket>& synced_queue() { return queue_; }

    RecorderStats stats() const;
    std::size_t buffer_size(const std::string& stream_id) const;
    std::optional<Sample> latched_slot(const std::string& stream_id) const;

private:
    struct StreamState {
        StreamBuffer buffer;
        std::optional<Timestamp> horizon;
        bool ended = false;
        std::optional<Sample> last_value;
    };

    StreamState& state(const std::string& id);
    const StreamState& state(const std::string& id) const;
    bool covered(const StreamState& st, Timestamp ref) const;
    void prune_after(Timestamp ref);
    StepResult step_locked(bool force);

    std::vector<StreamDescriptor> streams_;
    SyncConfig cfg_;
    Nanos tol_;
    std::string ref_id_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable space_cv_;
    std::uint64_t generation_ = 0;
    std::map<std::string, StreamState> states_;
    std::optional<Timestamp> cutoff_;
    RecorderStats stats_;
    BoundedQueue<SyncedPacket> queue_;
};

/// Writes one packet into `temp_root/<19-digit ref_stamp>/`: `<view>.png`
/// per image and kin.json last, each via write-then-rename. Throws IoError.
void write_packet(const SyncedPacket& p, const std::filesystem::path& temp_root);

}  // namespace surgsync::online
