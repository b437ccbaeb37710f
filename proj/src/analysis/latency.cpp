#include "surgsync/analysis/latency.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/dataset/manifest.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace surgsync::analysis {

namespace {

// Neumaier-compensated sum over values sorted ascending, so the result does
// not depend on input order.
double stable_sum(std::span<const double> sorted) {
    double sum = 0, comp = 0;
    for (double x : sorted) {
        double t = sum + x;
        comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

SummaryStats summarize(std::span<const double> values_ms) {
    if (values_ms.empty()) throw Error("no latency samples");
    std::vector<double> v(values_ms.begin(), values_ms.end());
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    SummaryStats s;
    s.count = n;
    s.min_ms = v.front();
    s.max_ms = v.back();
    s.median_ms = v[(n - 1) / 2];
    s.mean_ms = stable_sum(v) / static_cast<double>(n);
    if (n > 1) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - s.mean_ms) * (v[i] - s.mean_ms);
        std::sort(sq.begin(), sq.end());
        s.std_ms = std::sqrt(stable_sum(sq) / static_cast<double>(n - 1));
    }
    return s;
}

Histogram make_histogram(std::span<const double> values_ms, double bin_width_ms) {
    if (!(bin_width_ms > 0) || !std::isfinite(bin_width_ms)) throw Error("histogram bin width must be positive");
    Histogram h{bin_width_ms, {}};
    for (double x : values_ms) {
        if (!(x >= 0) || !std::isfinite(x)) throw Error("histogram values must be finite and nonnegative");
        auto k = static_cast<std::size_t>(std::floor(x / bin_width_ms));
        if (k >= h.counts.size()) h.counts.resize(k + 1, 0);
        ++h.counts[k];
    }
    return h;
}

FrequencyStats frequency_stats(std::span<const Timestamp> ref_stamps) {
    if (ref_stamps.size() < 2) throw Error("frequency statistics need at least 2 packets");
    std::vector<double> rates;
    rates.reserve(ref_stamps.size() - 1);
    for (std::size_t i = 1; i < ref_stamps.size(); ++i) {
        Nanos gap = ref_stamps[i] - ref_stamps[i - 1];
        if (gap <= 0) throw Error("reference stamps are not strictly increasing");
        rates.push_back(1e9 / static_cast<double>(gap));
    }
    auto s = summarize(rates);
    return {s.mean_ms, s.std_ms};
}

FrequencyStats frequency_stats(const std::filesystem::path& run_dir) {
    return frequency_stats(read_manifest(run_dir).ref_stamps);
}

LatencyReport latency_stats(const std::filesystem::path& run_dir, const std::string& reference,
                            double bin_width_ms) {
    RunManifest m = read_manifest(run_dir);
    const std::string resolved = m.sync.resolve_reference(m.streams);
    if (reference != resolved)
        throw Error(fmt::format("run '{}' was matched against '{}', not '{}'", m.run_id, resolved, reference));
    if (m.packet_count == 0) throw Error(fmt::format("run '{}' has no packets", m.run_id));

    LatencyReport r;
    r.run_id = m.run_id;
    r.reference = reference;
    std::vector<double> pooled;
    for (const auto& d : m.streams) {
        if (!d.is_numeric() || d.is_latched()) continue;
        std::vector<double> ms;
        for (const auto& line : read_records(layout::records_path(run_dir, d.stream_id))) {
            if (!line.delta_t) continue;
            ms.push_back(static_cast<double>(std::llabs(*line.delta_t)) / 1e6);
        }
        if (ms.empty()) continue;
        r.streams[d.stream_id] = summarize(ms);
        pooled.insert(pooled.end(), ms.begin(), ms.end());
    }
    if (pooled.empty()) throw Error(fmt::format("run '{}' has no non-latched latency samples", m.run_id));
    r.pooled = summarize(pooled);
    r.histogram = make_histogram(pooled, bin_width_ms);
    if (m.ref_stamps.size() >= 2) r.frequency = frequency_stats(m.ref_stamps);
    return r;
}

void to_json(nlohmann::json& j, const SummaryStats& s) {
    j = {{"mean_ms", s.mean_ms}, {"std_ms", s.std_ms}, {"median_ms", s.median_ms},
         {"min_ms", s.min_ms},   {"max_ms", s.max_ms}, {"count", s.count}};
}

void to_json(nlohmann::json& j, const LatencyReport& r) {
    j = nlohmann::json::object();
    j["run_id"] = r.run_id;
    j["reference"] = r.reference;
    j["streams"] = r.streams;
    j["pooled"] = r.pooled;
    j["histogram"] = {{"bin_width_ms", r.histogram.bin_width_ms}, {"counts", r.histogram.counts}};
    if (r.frequency)
        j["frequency"] = {{"mean_hz", r.frequency->mean_hz}, {"std_hz", r.frequency->std_hz}};
    else
        j["frequency"] = nullptr;
}

}  // namespace surgsync::analysis
