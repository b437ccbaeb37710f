#pragma once

#include "surgsync/core/timestamp.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace surgsync::analysis {

struct SummaryStats {
    double mean_ms = 0;
    double std_ms = 0;     // sample (n-1); 0 when count == 1
    double median_ms = 0;  // lower middle value for even counts
    double min_ms = 0;
    double max_ms = 0;
    std::uint64_t count = 0;
};

struct Histogram {
    double bin_width_ms = 0.5;
    std::vector<std::uint64_t> counts;  // bin k covers [k*w, (k+1)*w)
};

struct FrequencyStats {
    double mean_hz = 0;
    double std_hz = 0;
};

struct LatencyReport {
    std::string run_id;
    std::string reference;
    std::map<std::string, SummaryStats> streams;
    SummaryStats pooled;
    Histogram histogram;
    std::optional<FrequencyStats> frequency;  // absent for runs with fewer than 2 packets
};

/// Order-independent summary of a nonempty sample. Throws Error when empty.
SummaryStats summarize(std::span<const double> values_ms);

Histogram make_histogram(std::span<const double> values_ms, double bin_width_ms);

/// Instantaneous rates 1/(t[i+1]-t[i]). Throws Error for fewer than 2 stamps.
FrequencyStats frequency_stats(std::span<const Timestamp> ref_stamps);
FrequencyStats frequency_stats(const std::filesystem::path& run_dir);

/// |delta_t| statistics in milliseconds for every non-latched numeric stream
/// of a final run. `reference` must name the run's reference stream.
LatencyReport latency_stats(const std::filesystem::path& run_dir, const std::string& reference,
                            double bin_width_ms = 0.5);

void to_json(nlohmann::json& j, const SummaryStats& s);
void to_json(nlohmann::json& j, const LatencyReport& r);

}  // namespace surgsync::analysis
