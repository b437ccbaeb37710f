#pragma once

#include "surgsync/core/stream.hpp"

#include <cstddef>
#include <deque>

namespace surgsync {

/// Stamp-ordered queue of samples for one stream. Pushing past capacity
/// evicts the oldest entries.
class StreamBuffer {
public:
    StreamBuffer(StreamDescriptor desc, std::size_t capacity);

    const StreamDescriptor& descriptor() const { return desc_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const std::deque<Sample>& samples() const { return items_; }
    const Sample& front() const { return items_.front(); }
    const Sample& back() const { return items_.back(); }

    /// Returns the number of samples evicted to make room.
    std::size_t push(Sample s);
    void pop_front() { items_.pop_front(); }

    /// Drops every sample stamped before `t`.
    void prune_before(Timestamp t);
    /// Keeps the newest sample at or before `t` and everything after it.
    void prune_keep_last_before(Timestamp t);

    const Sample* last_at_or_before(Timestamp t) const;

    std::size_t evicted() const { return evicted_; }

private:
    StreamDescriptor desc_;
    std::size_t capacity_;
    std::deque<Sample> items_;
    std::size_t evicted_ = 0;
};

struct ClosestSample {
    const Sample& sample;
    Nanos delta_t;  // sample.stamp - ref
};

/// Sample minimizing |stamp - ref|; on a tie the earlier sample wins.
/// Throws Error on an empty buffer.
ClosestSample get_closest(const StreamBuffer& buf, Timestamp ref);

}  // namespace surgsync
