#include "surgsync/post/float_io.hpp"

#include "surgsync/core/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace surgsync::post {

namespace {

float load_f32(const char* p, bool little) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) {
        auto byte = static_cast<std::uint32_t>(static_cast<unsigned char>(p[little ? i : 3 - i]));
        bits |= byte << (8 * i);
    }
    return std::bit_cast<float>(bits);
}

void store_f32_le(std::string& out, float v) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(bits >> (8 * i)));
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void dump(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot create {}", path.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

}  // namespace

FloatImage read_pfm(const std::filesystem::path& path) {
    const std::string bytes = slurp(path);
    std::istringstream head(bytes);
    std::string magic;
    int w = 0, h = 0;
    double scale = 0;
    head >> magic >> w >> h >> scale;
    if (!head || (magic != "Pf" && magic != "PF") || w < 1 || h < 1 || scale == 0)
        throw Error(fmt::format("{}: not a PFM file", path.string()));
    head.get();  // single whitespace before the raster
    const auto offset = static_cast<std::size_t>(head.tellg());
    const int channels = magic == "PF" ? 3 : 1;
    const bool little = scale < 0;
    const std::size_t count = static_cast<std::size_t>(w) * h * channels;
    if (bytes.size() < offset + count * 4) throw Error(fmt::format("{}: truncated PFM raster", path.string()));
    FloatImage img(w, h, channels);
    const char* p = bytes.data() + offset;
    for (int row = 0; row < h; ++row) {
        const int y = h - 1 - row;
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c, p += 4) img.at(x, y, c) = load_f32(p, little);
    }
    return img;
}

void write_pfm(const std::filesystem::path& path, const FloatImage& img) {
    if (img.channels != 1 && img.channels != 3) throw Error("PFM supports 1 or 3 channels");
    std::string out = fmt::format("{}\n{} {}\n-1.0\n", img.channels == 3 ? "PF" : "Pf", img.width, img.height);
    for (int row = 0; row < img.height; ++row) {
        const int y = img.height - 1 - row;
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) store_f32_le(out, static_cast<float>(img.at(x, y, c)));
    }
    dump(path, out);
}

FloatImage read_flo(const std::filesystem::path& path) {
    const std::string bytes = slurp(path);
    if (bytes.size() < 12 || load_f32(bytes.data(), true) != 202021.25f)
        throw Error(fmt::format("{}: not a .flo file", path.string()));
    std::int32_t w = 0, h = 0;
    std::memcpy(&w, bytes.data() + 4, 4);
    std::memcpy(&h, bytes.data() + 8, 4);
    if (w < 1 || h < 1) throw Error(fmt::format("{}: bad .flo size", path.string()));
    const std::size_t count = static_cast<std::size_t>(w) * h * 2;
    if (bytes.size() < 12 + count * 4) throw Error(fmt::format("{}: truncated .flo data", path.string()));
    FloatImage flow(w, h, 2);
    const char* p = bytes.data() + 12;
    for (std::size_t i = 0; i < count; ++i, p += 4) flow.data[i] = load_f32(p, true);
    return flow;
}

void write_flo(const std::filesystem::path& path, const FloatImage& flow) {
    if (flow.channels != 2) throw Error(".flo files hold 2-channel flow");
    std::string out;
    store_f32_le(out, 202021.25f);
    for (std::int32_t v : {static_cast<std::int32_t>(flow.width), static_cast<std::int32_t>(flow.height)}) {
        auto u = static_cast<std::uint32_t>(v);
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(u >> (8 * i)));
    }
    for (double v : flow.data) store_f32_le(out, static_cast<float>(v));
    dump(path, out);
}

}  // namespace surgsync::post
