#pragma once

#include <vector>

#include "thermoscan/raster.hpp"

namespace thermoscan::imgproc {

// Normalized 1-D Gaussian taps, radius ceil(3 sigma); index radius is the centre.
std::vector<double> gaussian_kernel(double sigma);

// Reflect-101 index into [0, n): -1 -> 1, n -> n - 2.
int reflect101(int i, int n) noexcept;

// Separable Gaussian smoothing with reflect-101 borders.
GrayImage gaussian_blur(const GrayImage& g, double sigma);

}  // namespace thermoscan::imgproc
