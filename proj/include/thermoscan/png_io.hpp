#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "thermoscan/raster.hpp"

namespace thermoscan::png {

using Bytes = std::vector<std::uint8_t>;

// Encoders are deterministic: fixed zlib level, fixed filter, no time chunk.
Bytes encode_rgb8(int width, int height, std::span<const std::uint8_t> rgb);
Bytes encode_gray8(int width, int height, std::span<const std::uint8_t> gray);
Bytes encode_gray16(int width, int height, std::span<const std::uint16_t> gray);

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;   // 1 (gray) or 3 (rgb); alpha is dropped, palettes expanded
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint16_t> samples;  // width * height * channels

  double max_value() const noexcept { return bit_depth == 16 ? 65535.0 : 255.0; }
};

// Throws Error(BadPng) on anything libpng rejects.
Decoded decode(std::span<const std::uint8_t> bytes);

// Debug dumps.
Bytes encode_gray(const GrayImage& g);
Bytes encode_mask(const BinaryMask& m);
std::string to_pgm(const GrayImage& g);

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
Bytes read_file(const std::filesystem::path& path);

}  // namespace thermoscan::png
