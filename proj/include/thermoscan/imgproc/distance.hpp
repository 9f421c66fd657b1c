#pragma once

#include "thermoscan/raster.hpp"

namespace thermoscan::imgproc {

// Exact Euclidean distance from every foreground pixel to the nearest
// background pixel, by two separable lower-envelope passes over squared
// distances. Background pixels get 0 and the ring just outside the image
// counts as background, so no foreground pixel is farther than its distance
// to the frame.
DistanceField distance_transform(const BinaryMask& b);

}  // namespace thermoscan::imgproc
