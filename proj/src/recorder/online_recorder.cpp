#include "surgsync/recorder/online_recorder.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/png_io.hpp"
#include "surgsync/dataset/reformat.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace fs = std::filesystem;

namespace surgsync::online {

OnlineRecorder::OnlineRecorder(std::vector<StreamDescriptor> streams, SyncConfig cfg)
    : streams_(std::move(streams)), cfg_(std::move(cfg)),
      queue_(static_cast<std::size_t>(std::max(1, cfg_.synced_queue_capacity))) {
    cfg_.validate();
    tol_ = cfg_.tolerance_ns();
    for (const auto& d : streams_) {
        d.validate();
        auto [it, fresh] = states_.try_emplace(
            d.stream_id, StreamState{StreamBuffer(d, static_cast<std::size_t>(cfg_.per_stream_buffer_capacity)),
                                     std::nullopt, false, std::nullopt});
        if (!fresh) throw Error(fmt::format("duplicate stream_id '{}'", d.stream_id));
    }
    ref_id_ = cfg_.resolve_reference(streams_);
}

OnlineRecorder::StreamState& OnlineRecorder::state(const std::string& id) {
    auto it = states_.find(id);
    if (it == states_.end()) throw Error(fmt::format("unknown stream_id '{}'", id));
    return it->second;
}

const OnlineRecorder::StreamState& OnlineRecorder::state(const std::string& id) const {
    auto it = states_.find(id);
    if (it == states_.end()) throw Error(fmt::format("unknown stream_id '{}'", id));
    return it->second;
}

void OnlineRecorder::push_sample(Sample s) {
    {
        std::lock_guard lock(mu_);
        auto& st = state(s.stream_id);
        if (!kind_matches(st.buffer.descriptor(), s))
            throw Error(fmt::format("sample kind does not match stream '{}'", s.stream_id));
        if (!st.horizon || *st.horizon < s.stamp) st.horizon = s.stamp;
        if (st.buffer.descriptor().is_latched()) st.last_value = s;
        stats_.evicted_count += st.buffer.push(std::move(s));
        stats_.max_buffer_fill = std::max(stats_.max_buffer_fill, st.buffer.size());
        ++generation_;
    }
    cv_.notify_all();
}

void OnlineRecorder::advance_horizon(const std::string& stream_id, Timestamp t) {
    {
        std::lock_guard lock(mu_);
        auto& st = state(stream_id);
        if (st.horizon && !(*st.horizon < t)) return;
        st.horizon = t;
        ++generation_;
    }
    cv_.notify_all();
}

void OnlineRecorder::mark_ended(const std::string& stream_id) {
    {
        std::lock_guard lock(mu_);
        state(stream_id).ended = true;
        ++generation_;
    }
    cv_.notify_all();
}

void OnlineRecorder::request_cutoff(Timestamp t_end) {
    {
        std::lock_guard lock(mu_);
        cutoff_ = t_end;
        ++generation_;
    }
    cv_.notify_all();
}

std::optional<Timestamp> OnlineRecorder::cutoff() const {
    std::lock_guard lock(mu_);
    return cutoff_;
}

void OnlineRecorder::wait_for_input(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    auto seen = generation_;
    cv_.wait_for(lock, timeout, [&] { return generation_ != seen; });
}

std::optional<Timestamp> OnlineRecorder::pending_reference() const {
    std::lock_guard lock(mu_);
    const auto& buf = state(ref_id_).buffer;
    if (buf.empty()) return std::nullopt;
    return buf.front().stamp;
}

bool OnlineRecorder::covered(const StreamState& st, Timestamp ref) const {
    if (st.ended) return true;
    const auto& buf = st.buffer;
    if (buf.descriptor().is_latched()) {
        if (st.horizon && !(*st.horizon < ref)) return true;
        return !buf.empty() && !(buf.back().stamp < ref);
    }
    // Samples are stamp-ordered per stream, so the first sample at or after
    // ref bounds the nearest neighbour; past ref + tol nothing can match.
    if (!buf.empty() && !(buf.back().stamp < ref)) return true;
    return st.horizon && !(*st.horizon < ref + tol_);
}

void OnlineRecorder::prune_after(Timestamp ref) {
    for (auto& [id, st] : states_) {
        if (id == ref_id_) continue;
        if (st.buffer.descriptor().is_latched())
            st.buffer.prune_keep_last_before(ref);
        else
            st.buffer.prune_before(ref - tol_);
    }
}

StepResult OnlineRecorder::sync_step(bool force) {
    StepResult res;
    {
        std::lock_guard lock(mu_);
        res = step_locked(force);
    }
    space_cv_.notify_all();
    return res;
}

bool OnlineRecorder::wait_for_space(const std::string& stream_id, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    const auto& buf = state(stream_id).buffer;
    return space_cv_.wait_for(lock, timeout, [&] { return buf.size() < buf.capacity(); });
}

StepResult OnlineRecorder::step_locked(bool force) {
    auto& ref_state = state(ref_id_);
    auto& refs = ref_state.buffer;
    if (refs.empty()) {
        if (ref_state.ended) return StepResult::finished;
        if (cutoff_ && ref_state.horizon && *cutoff_ < *ref_state.horizon) return StepResult::finished;
        return StepResult::idle;
    }
    const Timestamp r = refs.front().stamp;
    if (cutoff_ && *cutoff_ < r) {
        while (!refs.empty()) refs.pop_front();
        return StepResult::finished;
    }

    bool late = false;
    for (const auto& [id, st] : states_) {
        if (id == ref_id_ || covered(st, r)) continue;
        late = true;
    }
    if (late && !force) {
        // Samples this old can never be the match for r or any later frame.
        prune_after(r);
        return StepResult::not_ready;
    }

    if (queue_.full()) {
        refs.pop_front();
        ++stats_.drop_count;
        prune_after(r);
        return StepResult::dropped;
    }
    if (late) ++stats_.late_count;

    SyncedPacket p;
    p.ref_stamp = r;
    bool ok = true;
    for (const auto& d : streams_) {
        const auto& st = states_.at(d.stream_id);
        if (d.stream_id == ref_id_) {
            p.images.push_back({d.stream_id, d.view_name(), refs.front().image(), r});
            continue;
        }
        if (d.is_latched()) {
            LatchedValue v;
            if (const Sample* s = st.buffer.last_at_or_before(r)) {
                v.values = s->values();
                v.stamp = s->stamp;
            } else {
                v.values = d.latched_default.empty()
                               ? NumericVector(static_cast<std::size_t>(d.arity), 0.0)
                               : d.latched_default;
            }
            p.latched.emplace(d.stream_id, std::move(v));
            continue;
        }
        if (st.buffer.empty()) {
            ok = false;
            break;
        }
        auto c = get_closest(st.buffer, r);
        if (c.delta_t > tol_ || c.delta_t < -tol_) {
            ok = false;
            break;
        }
        if (d.is_image())
            p.images.push_back({d.stream_id, d.view_name(), c.sample.image(), c.sample.stamp});
        else
            p.matched.emplace(d.stream_id, NumericMatch{c.sample.values(), c.sample.stamp, c.delta_t});
    }

    refs.pop_front();
    prune_after(r);
    if (!ok) {
        ++stats_.reject_count;
        return StepResult::rejected;
    }
    queue_.try_push(std::move(p));
    ++stats_.packet_count;
    return StepResult::emitted;
}

RecorderStats OnlineRecorder::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

std::size_t OnlineRecorder::buffer_size(const std::string& stream_id) const {
    std::lock_guard lock(mu_);
    return state(stream_id).buffer.size();
}

std::optional<Sample> OnlineRecorder::latched_slot(const std::string& stream_id) const {
    std::lock_guard lock(mu_);
    return state(stream_id).last_value;
}

void write_packet(const SyncedPacket& p, const fs::path& temp_root) {
    if (p.ref_stamp.nanos < 0) throw Error(fmt::format("negative reference stamp {}", p.ref_stamp.nanos));
    auto folder = temp_root / folder_name(p.ref_stamp);
    std::error_code ec;
    fs::create_directories(folder, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", folder.string(), ec.message()));
    for (const auto& im : p.images) {
        auto bytes = encode_png(im.frame);
        write_file_atomic(folder / (im.view + ".png"),
                          std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    }
    write_file_atomic(folder / kPacketRecordFile, encode_packet_record(p));
}

}  // namespace surgsync::online
