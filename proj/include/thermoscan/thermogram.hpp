#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "thermoscan/raster.hpp"

namespace thermoscan {

// RGB raster, channel-interleaved, every sample in [0,1].
class VisualImage {
 public:
  static constexpr int kChannels = 3;

  VisualImage() = default;
  VisualImage(int width, int height);
  // Throws ShapeMismatch on length mismatch, InvalidParameter on samples outside [0,1].
  VisualImage(int width, int height, std::vector<float> rgb);

  // Exact inverse of to_rgb8() for 8-bit sources.
  static VisualImage from_rgb8(int width, int height, std::span<const std::uint8_t> rgb);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  float at(int row, int col, int channel) const noexcept {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * kChannels + channel];
  }
  void set(int row, int col, float r, float g, float b) noexcept;
  const std::vector<float>& data() const noexcept { return data_; }

  std::vector<std::uint8_t> to_rgb8() const;

  friend bool operator==(const VisualImage&, const VisualImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// Per-pixel temperatures in degrees Celsius.
using TemperatureMatrix = Raster<float, struct TemperatureTag>;
using Metadata = std::map<std::string, std::string>;

// A visual image paired with a same-shape temperature matrix. Immutable once
// built. The id is meta["id"] when present, otherwise a content digest, so the
// same pixels always get the same id wherever they are loaded.
class Thermogram {
 public:
  Thermogram() = default;
  // Throws ShapeMismatch when visual and temperature dimensions differ.
  Thermogram(VisualImage visual, TemperatureMatrix temperature, Metadata meta = {});

  const std::string& id() const noexcept { return id_; }
  const VisualImage& visual() const noexcept { return visual_; }
  const TemperatureMatrix& temperature() const noexcept { return temperature_; }
  const Metadata& meta() const noexcept { return meta_; }
  int width() const noexcept { return visual_.width(); }
  int height() const noexcept { return visual_.height(); }

  friend bool operator==(const Thermogram&, const Thermogram&) = default;

 private:
  std::string id_;
  VisualImage visual_;
  TemperatureMatrix temperature_;
  Metadata meta_;
};

std::string content_id(const VisualImage& visual, const TemperatureMatrix& temperature,
                       const Metadata& meta);

struct LoadOptions {
  float min_celsius = -40.0f;
  float max_celsius = 200.0f;
};

inline constexpr std::uint16_t kTgrmVersion = 1;

// TGRM container, little-endian:
//   "TGRM" | u16 version | u32 header length | JSON header
//   | width*height f32 temperatures, row-major | u32 PNG length | PNG (8-bit RGB)
// Trailing bytes are rejected.
Thermogram load_thermogram(std::span<const std::uint8_t> bytes, const LoadOptions& options = {});
std::vector<std::uint8_t> save_thermogram(const Thermogram& t);

}  // namespace thermoscan
