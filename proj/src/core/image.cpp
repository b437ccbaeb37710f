#include "surgsync/core/image.hpp"

#include "surgsync/core/error.hpp"

namespace surgsync {

ImageFrame::ImageFrame(int width, int height, int channels)
    : ImageFrame(width, height, channels,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * channels, 0)) {}

ImageFrame::ImageFrame(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width < 1 || height < 1) throw Error("image dimensions must be positive");
    if (channels != 1 && channels != 3) throw Error("image channels must be 1 or 3");
    if (data_.size() != static_cast<std::size_t>(width) * height * channels)
        throw Error("image data length != width * height * channels");
}

FloatImage::FloatImage(int w, int h, int c, double fill)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(w) * h * c, fill) {}

void embed_stamp_pixels(ImageFrame& img, Timestamp t) {
    if (img.width() < 8) return;
    auto bits = static_cast<std::uint64_t>(t.nanos);
    for (int i = 0; i < 8; ++i) img.at(i, 0, 0) = static_cast<std::uint8_t>(bits >> (8 * i));
}

std::optional<Timestamp> read_stamp_pixels(const ImageFrame& img) {
    if (img.width() < 8) return std::nullopt;
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(img.at(i, 0, 0)) << (8 * i);
    return Timestamp{static_cast<std::int64_t>(bits)};
}

}  // namespace surgsync
