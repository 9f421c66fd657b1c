#pragma once

#include <algorithm>
#include <cmath>

#include "thermoscan/raster.hpp"
#include "thermoscan/thermogram.hpp"

namespace thermoscan::imgproc {

// Luma weights for R, G, B.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

// 256-level quantization shared by every histogram-based operation.
inline int quantize(float v) noexcept {
  const double q = std::floor(static_cast<double>(v) * 255.0 + 0.5);
  return static_cast<int>(std::clamp(q, 0.0, 255.0));
}

GrayImage to_grayscale(const VisualImage& img);

// 1 where g >= th, else 0.
BinaryMask threshold_fixed(const GrayImage& g, float th);

// 1 where quantize(g) > bin; pairs with otsu_threshold().
BinaryMask threshold_above_bin(const GrayImage& g, int bin);

}  // namespace thermoscan::imgproc
