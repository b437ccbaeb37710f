#pragma once

#include "surgsync/core/timestamp.hpp"

#include <atomic>
#include <chrono>

namespace surgsync {

/// Maps wall-clock time onto the run's time base. `speed` is the number of
/// stream seconds per wall second; 0 disables pacing entirely.
class RunClock {
public:
    explicit RunClock(Timestamp epoch = {}, double speed = 1.0);

    bool paced() const { return speed_ > 0.0; }
    double speed() const { return speed_; }
    Timestamp epoch() const { return epoch_; }

    Timestamp now() const;

    /// Blocks until now() >= t or `stop` becomes true. Returns false when
    /// interrupted by `stop`. Sleeps at most `slice` wall time per call when
    /// `slice` is nonzero, so callers can publish progress while waiting.
    bool sleep_until(Timestamp t, const std::atomic<bool>* stop = nullptr,
                     std::chrono::nanoseconds slice = std::chrono::nanoseconds::zero()) const;

private:
    Timestamp epoch_;
    double speed_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace surgsync
