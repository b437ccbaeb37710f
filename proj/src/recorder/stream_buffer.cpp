#include "surgsync/recorder/stream_buffer.hpp"

#include "surgsync/core/error.hpp"

#include <algorithm>

namespace surgsync {

StreamBuffer::StreamBuffer(StreamDescriptor desc, std::size_t capacity)
    : desc_(std::move(desc)), capacity_(capacity) {
    if (capacity_ < 1) throw Error("stream buffer capacity must be >= 1");
}

std::size_t StreamBuffer::push(Sample s) {
    if (items_.empty() || !(s.stamp < items_.back().stamp)) {
        items_.push_back(std::move(s));
    } else {
        auto pos = std::upper_bound(items_.begin(), items_.end(), s.stamp,
                                    [](Timestamp t, const Sample& x) { return t < x.stamp; });
        items_.insert(pos, std::move(s));
    }
    std::size_t n = 0;
    while (items_.size() > capacity_) {
        items_.pop_front();
        ++n;
    }
    evicted_ += n;
    return n;
}

void StreamBuffer::prune_before(Timestamp t) {
    while (!items_.empty() && items_.front().stamp < t) items_.pop_front();
}

void StreamBuffer::prune_keep_last_before(Timestamp t) {
    while (items_.size() >= 2 && !(t < items_[1].stamp)) items_.pop_front();
}

const Sample* StreamBuffer::last_at_or_before(Timestamp t) const {
    auto it = std::upper_bound(items_.begin(), items_.end(), t,
                               [](Timestamp ref, const Sample& x) { return ref < x.stamp; });
    if (it == items_.begin()) return nullptr;
    return &*std::prev(it);
}

ClosestSample get_closest(const StreamBuffer& buf, Timestamp ref) {
    const auto& items = buf.samples();
    if (items.empty()) throw Error("get_closest on empty buffer '" + buf.descriptor().stream_id + "'");
    auto it = std::lower_bound(items.begin(), items.end(), ref,
                               [](const Sample& x, Timestamp t) { return x.stamp < t; });
    if (it == items.end()) {
        const auto& s = items.back();
        return {s, s.stamp - ref};
    }
    if (it == items.begin()) return {*it, it->stamp - ref};
    const auto& after = *it;
    const auto& before = *std::prev(it);
    Nanos d_after = after.stamp - ref;    // >= 0
    Nanos d_before = ref - before.stamp;  // > 0
    if (d_before <= d_after) return {before, -d_before};
    return {after, d_after};
}

}  // namespace surgsync
