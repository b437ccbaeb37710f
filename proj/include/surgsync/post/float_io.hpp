#pragma once

#include "surgsync/core/image.hpp"

#include <filesystem>

namespace surgsync::post {

/// Portable Float Map (1 or 3 channels, float32). Rows are stored
/// bottom-to-top on disk and returned top-to-bottom.
FloatImage read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const FloatImage& img);

/// Middlebury .flo optical-flow file (2 channels, float32, little-endian).
FloatImage read_flo(const std::filesystem::path& path);
void write_flo(const std::filesystem::path& path, const FloatImage& flow);

}  // namespace surgsync::post
