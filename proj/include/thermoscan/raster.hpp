#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "thermoscan/error.hpp"

namespace thermoscan {

struct Point {
  int row = 0;
  int col = 0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

// Row-major single-channel raster. The tag keeps intensity images, masks,
// distance fields and temperature matrices from being mixed up.
template <class T, class Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(checked_dim(width)), height_(checked_dim(height)),
        data_(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), fill) {}
  Raster(int width, int height, std::vector<T> data)
      : width_(checked_dim(width)), height_(checked_dim(height)), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
      throw Error(Errc::ShapeMismatch, "raster data length " + std::to_string(data_.size()) +
                                           " != " + std::to_string(width_) + "x" +
                                           std::to_string(height_));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool in_bounds(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  T& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const noexcept { return data_[index(row, col)]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> row(int r) noexcept {
    return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int r) const noexcept {
    return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static int checked_dim(int d) {
    if (d < 0) throw Error(Errc::ShapeMismatch, "negative raster dimension");
    return d;
  }
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

template <class A, class B>
bool same_shape(const A& a, const B& b) noexcept {
  return a.width() == b.width() && a.height() == b.height();
}

// Intensities in [0,1].
using GrayImage = Raster<float, struct GrayTag>;
// Values exactly 0 or 1.
using BinaryMask = Raster<std::uint8_t, struct MaskTag>;
// Per-pixel Euclidean distance in pixels.
using DistanceField = Raster<double, struct DistanceTag>;
using LabelRaster = Raster<std::int32_t, struct LabelTag>;

// 0 is background; every positive label is <= label_count, except the
// watershed boundary label which is label_count + 1.
struct LabelMap {
  LabelRaster labels;
  int label_count = 0;

  LabelMap() = default;
  LabelMap(int width, int height) : labels(width, height, 0) {}
  LabelMap(LabelRaster l, int count) : labels(std::move(l)), label_count(count) {}

  int width() const noexcept { return labels.width(); }
  int height() const noexcept { return labels.height(); }
  std::int32_t operator()(int row, int col) const noexcept { return labels(row, col); }
  std::int32_t boundary_label() const noexcept { return label_count + 1; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

}  // namespace thermoscan
