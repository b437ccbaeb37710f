#pragma once

#include "surgsync/core/source.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace surgsync {

struct SyntheticSourceConfig {
    StreamDescriptor descriptor;
    double jitter_std_ms = 1.0;
    double drop_probability = 0.0;
    double latency_offset_ms = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Bounds a synthetic stream: ideal stamps run from `epoch` while the elapsed
/// ideal time stays within `duration`.
struct SourceWindow {
    Timestamp epoch{0};
    Nanos duration = 0;
};

/// Stamps are epoch + round(i / rate) + offset + jitter_i, kept strictly
/// increasing by bumping collisions to previous + 1 ns. Each sample is
/// independently dropped. Latched streams tick at the nominal rate but emit
/// only when the held value changes.
SourcePtr open_synthetic_source(const SyntheticSourceConfig& cfg, SourceWindow window);

/// Parses a streams document: either a JSON array of configs or an object
/// with a "streams" array.
std::vector<SyntheticSourceConfig> load_source_configs(const std::filesystem::path& path);
std::vector<SyntheticSourceConfig> parse_source_configs(const std::string& text);

/// Mixes a run-wide seed into each stream's own seed.
std::uint64_t mix_seed(std::uint64_t run_seed, std::uint64_t stream_seed);

}  // namespace surgsync
