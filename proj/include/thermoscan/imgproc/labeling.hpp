#pragma once

#include "thermoscan/raster.hpp"

namespace thermoscan::imgproc {

enum class Connectivity { Four = 4, Eight = 8 };

// Two-pass union-find labelling. Labels are 1..n in raster order of each
// component's first pixel; background stays 0.
LabelMap connected_components(const BinaryMask& b, Connectivity connectivity = Connectivity::Eight);

}  // namespace thermoscan::imgproc
