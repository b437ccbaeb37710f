#pragma once

#include "surgsync/core/timestamp.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace surgsync {

/// 8-bit, row-major, interleaved image.
class ImageFrame {
public:
    ImageFrame() = default;
    ImageFrame(int width, int height, int channels);
    ImageFrame(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    std::uint8_t& at(int x, int y, int c = 0) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<std::uint8_t> data() { return data_; }
    std::span<const std::uint8_t> data() const { return data_; }

    /// Ideal capture time, set by synthetic sources only.
    std::optional<Timestamp> embedded_truth_stamp;

    friend bool operator==(const ImageFrame& a, const ImageFrame& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.channels_ == b.channels_ &&
               a.data_ == b.data_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<std::uint8_t> data_;
};

/// Real-valued image, row-major interleaved. Used for heatmaps, disparity,
/// depth and flow fields.
struct FloatImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    FloatImage() = default;
    FloatImage(int w, int h, int c = 1, double fill = 0.0);

    double& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

// The synthetic renderer writes the truth stamp into the first 8 pixels of
// row 0 (channel 0, little-endian) so it survives a PNG round trip.
void embed_stamp_pixels(ImageFrame& img, Timestamp t);
std::optional<Timestamp> read_stamp_pixels(const ImageFrame& img);

}  // namespace surgsync
