#pragma once

#include "surgsync/core/image.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace surgsync {

std::vector<std::uint8_t> encode_png(const ImageFrame& img);
ImageFrame decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const ImageFrame& img);
ImageFrame read_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace surgsync
