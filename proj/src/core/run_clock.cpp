#include "surgsync/core/run_clock.hpp"

#include <thread>

namespace surgsync {

RunClock::RunClock(Timestamp epoch, double speed)
    : epoch_(epoch), speed_(speed), start_(std::chrono::steady_clock::now()) {}

Timestamp RunClock::now() const {
    auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - start_)
                       .count();
    double scale = paced() ? speed_ : 1.0;
    return epoch_ + static_cast<Nanos>(static_cast<double>(elapsed) * scale);
}

bool RunClock::sleep_until(Timestamp t, const std::atomic<bool>* stop,
                           std::chrono::nanoseconds slice) const {
    if (!paced()) return !(stop && stop->load());
    constexpr auto kMaxNap = std::chrono::milliseconds(20);
    for (;;) {
        if (stop && stop->load()) return false;
        Timestamp n = now();
        if (n >= t) return true;
        auto wall = std::chrono::nanoseconds(static_cast<std::int64_t>((t - n) / speed_) + 1);
        auto nap = std::min<std::chrono::nanoseconds>(wall, kMaxNap);
        if (slice.count() > 0 && nap > slice) nap = slice;
        std::this_thread::sleep_for(nap);
        if (slice.count() > 0) return now() >= t;
    }
}

}  // namespace surgsync
