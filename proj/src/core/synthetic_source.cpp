#include "surgsync/core/synthetic_source.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/json_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace surgsync {

void SyntheticSourceConfig::validate() const {
    descriptor.validate();
    if (!(jitter_std_ms >= 0.0) || !std::isfinite(jitter_std_ms))
        throw Error(fmt::format("stream '{}': jitter_std_ms must be >= 0", descriptor.stream_id));
    if (!(drop_probability >= 0.0 && drop_probability <= 1.0))
        throw Error(fmt::format("stream '{}': drop_probability outside [0,1]", descriptor.stream_id));
    if (!std::isfinite(latency_offset_ms))
        throw Error(fmt::format("stream '{}': latency_offset_ms must be finite", descriptor.stream_id));
}

std::uint64_t mix_seed(std::uint64_t run_seed, std::uint64_t stream_seed) {
    // splitmix64 finalizer
    std::uint64_t z = run_seed ^ (stream_seed + 0x9e3779b97f4a7c15ULL + (run_seed << 6) + (run_seed >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

// Uniform in [0, 1) from the top 53 bits; fixed across standard libraries,
// unlike std::uniform_real_distribution.
double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
    double u1 = 1.0 - unit(rng);  // (0, 1]
    double u2 = unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct Channel {
    double amplitude, freq_hz, phase, offset;
};

class SyntheticSource final : public SampleSource {
public:
    SyntheticSource(SyntheticSourceConfig cfg, SourceWindow window)
        : cfg_(std::move(cfg)), window_(window), rng_(cfg_.seed),
          offset_ns_(ms_to_nanos(cfg_.latency_offset_ms)) {
        std::mt19937_64 shape(cfg_.seed ^ 0x5eed5eed5eed5eedULL);
        int n = cfg_.descriptor.is_image() ? 0 : cfg_.descriptor.arity;
        for (int j = 0; j < n; ++j) {
            channels_.push_back({0.5 + unit(shape), 0.05 + 0.5 * unit(shape),
                                 2.0 * std::numbers::pi * unit(shape), 2.0 * unit(shape) - 1.0});
        }
        // Latched streams toggle contact roughly every 0.5 to 2 seconds.
        toggle_period_s_ = 0.5 + 1.5 * unit(shape);
        toggle_phase_s_ = toggle_period_s_ * unit(shape);
    }

    const StreamDescriptor& descriptor() const override { return cfg_.descriptor; }

protected:
    std::optional<Sample> produce() override {
        const auto& d = cfg_.descriptor;
        for (;;) {
            Nanos rel = static_cast<Nanos>(std::llround(static_cast<double>(index_) * 1e9 / d.nominal_rate_hz));
            if (rel > window_.duration) return std::nullopt;
            std::uint64_t i = index_++;

            // Fixed draw order per index keeps sequences comparable across
            // drop settings: drop decision, then jitter.
            bool dropped = unit(rng_) < cfg_.drop_probability;
            double jitter_ms = cfg_.jitter_std_ms * gaussian(rng_);

            Timestamp ideal = window_.epoch + rel;
            Timestamp stamp = ideal + offset_ns_ + ms_to_nanos(jitter_ms);
            if (prev_ && stamp <= *prev_) stamp = *prev_ + 1;
            prev_ = stamp;

            if (d.is_latched()) {
                NumericVector v = latched_value(ideal);
                if (dropped) continue;
                if (last_latched_ && *last_latched_ == v) continue;
                last_latched_ = v;
                return Sample{d.stream_id, stamp, std::move(v)};
            }
            if (dropped) continue;
            if (d.is_image()) return Sample{d.stream_id, stamp, render(i, ideal)};
            return Sample{d.stream_id, stamp, numeric_value(ideal)};
        }
    }

private:
    NumericVector numeric_value(Timestamp ideal) const {
        double t = (ideal - window_.epoch) / 1e9;
        NumericVector v(channels_.size());
        for (std::size_t j = 0; j < channels_.size(); ++j) {
            const auto& c = channels_[j];
            v[j] = c.offset + c.amplitude * std::sin(2.0 * std::numbers::pi * c.freq_hz * t + c.phase);
        }
        if (cfg_.descriptor.pose) {
            // Rotation about a fixed axis with a slowly varying angle.
            double angle = 0.5 * v[3];
            double ax = 0.6, ay = 0.0, az = 0.8;
            v[3] = std::cos(angle / 2);
            v[4] = ax * std::sin(angle / 2);
            v[5] = ay * std::sin(angle / 2);
            v[6] = az * std::sin(angle / 2);
        }
        return v;
    }

    NumericVector latched_value(Timestamp ideal) const {
        double t = (ideal - window_.epoch) / 1e9 + toggle_phase_s_;
        bool contact = static_cast<long long>(std::floor(t / toggle_period_s_)) % 2 == 1;
        return NumericVector(static_cast<std::size_t>(cfg_.descriptor.arity), contact ? 300.0 : 100.0);
    }

    ImageFrame render(std::uint64_t i, Timestamp ideal) const {
        const auto& d = cfg_.descriptor;
        ImageFrame img(d.width, d.height, d.channels);
        for (int y = 0; y < d.height; ++y)
            for (int x = 0; x < d.width; ++x)
                for (int c = 0; c < d.channels; ++c)
                    img.at(x, y, c) = static_cast<std::uint8_t>((x * 3 + y * 2 + c * 40 + (cfg_.seed & 0x3f)) & 0x7f);
        const int marker = std::max(2, std::min(d.width, d.height) / 8);
        const int span_x = std::max(1, d.width - marker);
        const int mx = static_cast<int>((i * 2) % static_cast<std::uint64_t>(span_x));
        const int my = std::clamp(d.height / 2 - marker / 2, 0, d.height - marker);
        for (int y = my; y < my + marker; ++y)
            for (int x = mx; x < mx + marker; ++x)
                for (int c = 0; c < d.channels; ++c) img.at(x, y, c) = 255;
        embed_stamp_pixels(img, ideal);
        img.embedded_truth_stamp = ideal;
        return img;
    }

    SyntheticSourceConfig cfg_;
    SourceWindow window_;
    std::mt19937_64 rng_;
    Nanos offset_ns_;
    std::vector<Channel> channels_;
    double toggle_period_s_ = 1.0;
    double toggle_phase_s_ = 0.0;
    std::uint64_t index_ = 0;
    std::optional<Timestamp> prev_;
    std::optional<NumericVector> last_latched_;
};

}  // namespace

SourcePtr open_synthetic_source(const SyntheticSourceConfig& cfg, SourceWindow window) {
    cfg.validate();
    if (window.duration < 0) throw Error("synthetic source window duration must be >= 0");
    return std::make_unique<SyntheticSource>(cfg, window);
}

std::vector<SyntheticSourceConfig> parse_source_configs(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("streams config: {}", e.what()));
    }
    const nlohmann::json& arr = doc.is_array() ? doc : doc.at("streams");
    std::vector<SyntheticSourceConfig> out;
    try {
        for (const auto& e : arr) {
            SyntheticSourceConfig c;
            c.descriptor = e.at("descriptor").get<StreamDescriptor>();
            c.jitter_std_ms = e.value("jitter_std_ms", c.jitter_std_ms);
            c.drop_probability = e.value("drop_probability", c.drop_probability);
            c.latency_offset_ms = e.value("latency_offset_ms", c.latency_offset_ms);
            c.seed = e.value("seed", c.seed);
            c.validate();
            out.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("streams config: {}", e.what()));
    }
    for (std::size_t a = 0; a < out.size(); ++a)
        for (std::size_t b = a + 1; b < out.size(); ++b)
            if (out[a].descriptor.stream_id == out[b].descriptor.stream_id)
                throw Error(fmt::format("duplicate stream_id '{}'", out[a].descriptor.stream_id));
    return out;
}

std::vector<SyntheticSourceConfig> load_source_configs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open streams config {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_source_configs(ss.str());
}

}  // namespace surgsync
