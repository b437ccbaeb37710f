#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace surgsync {

/// Signed nanoseconds on the host monotonic time base shared by every stream
/// of a run.
struct Timestamp {
    std::int64_t nanos = 0;

    static constexpr Timestamp min() { return {std::numeric_limits<std::int64_t>::min()}; }
    static constexpr Timestamp max() { return {std::numeric_limits<std::int64_t>::max()}; }

    static constexpr Timestamp from_ms(std::int64_t ms) { return {ms * 1'000'000}; }
    static constexpr Timestamp from_seconds(std::int64_t s) { return {s * 1'000'000'000}; }

    constexpr double to_ms() const { return static_cast<double>(nanos) / 1e6; }
    constexpr double to_seconds() const { return static_cast<double>(nanos) / 1e9; }

    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

/// Signed difference between two timestamps, in nanoseconds.
using Nanos = std::int64_t;

constexpr Nanos operator-(Timestamp a, Timestamp b) { return a.nanos - b.nanos; }
constexpr Timestamp operator+(Timestamp a, Nanos d) { return {a.nanos + d}; }
constexpr Timestamp operator-(Timestamp a, Nanos d) { return {a.nanos - d}; }

/// Milliseconds (possibly fractional) to nanoseconds, rounded to nearest.
Nanos ms_to_nanos(double ms);

/// Zero-padded 19-digit decimal; lexicographic order equals numeric order for
/// non-negative stamps.
std::string folder_name(Timestamp t);

}  // namespace surgsync
