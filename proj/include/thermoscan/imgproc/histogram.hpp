#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "thermoscan/raster.hpp"

namespace thermoscan::imgproc {

// Counts over quantize(v); the bins sum to the pixel count.
using Histogram256 = std::array<std::uint64_t, 256>;

Histogram256 histogram(const GrayImage& g);

// v -> CDF(quantize(v)).
GrayImage equalize_global(const GrayImage& g);

// Inclusive bin range of one dynamic-equalization partition.
struct Partition {
  int lo = 0;
  int hi = 0;
  int span() const noexcept { return hi - lo + 1; }
  friend bool operator==(const Partition&, const Partition&) = default;
};

// Centered moving average; the window is truncated at the histogram ends.
std::vector<double> smooth_histogram(const Histogram256& h, int window);

// Splits [first occupied bin, last occupied bin] at the local minima of the
// smoothed histogram. A flat valley counts as one minimum at its middle bin.
// Partitions narrower than min_span are merged into their narrower neighbour
// until none remain (or only one partition is left).
std::vector<Partition> dhe_partitions(const Histogram256& h, int smoothing_window, int min_span);

// Dynamic histogram equalization: every partition gets an output range
// proportional to its bin span and is equalized into it through its own CDF.
// A constant image is returned unchanged.
GrayImage dhe(const GrayImage& g, int smoothing_window = 5, int min_partition_span = 8);

// Contrast-limited adaptive equalization with bilinear blending of the tile
// mappings. clip_limit is a multiple of the uniform bin height.
GrayImage clahe(const GrayImage& g, int tiles_x = 8, int tiles_y = 8, double clip_limit = 4.0);

// Per-tile contrast-limited mapping, exposed for tests: lut[b] is the clipped
// CDF at bin b.
std::array<double, 256> clahe_tile_lut(const Histogram256& tile_hist, double clip_limit);

// Argmax over t of the between-class variance w0*w1*(mu0-mu1)^2, compared
// exactly; ties go to the smallest t. Foreground is quantize(v) > t.
int otsu_threshold(const Histogram256& h);

}  // namespace thermoscan::imgproc
