#pragma once

#include "thermoscan/raster.hpp"

namespace thermoscan::imgproc {

// Marker-driven priority flood over `relief` (lower values flood first, ties
// by insertion order). Marker pixels keep their labels and every reached pixel
// takes the label of the basin that claimed it, so each basin stays 8-connected
// to its marker. With boundary_lines, a pixel that touches two basins when it
// is reached gets markers.boundary_label() and stops the flood there; so does
// any region pixel that no basin reaches.
//
// Throws NoMarkers when markers has no positive pixel, ShapeMismatch when the
// rasters differ in size.
LabelMap watershed(const GrayImage& relief, const LabelMap& markers, bool boundary_lines = true);

// As above, but pixels outside `region` are never flooded and stay 0.
LabelMap watershed(const GrayImage& relief, const LabelMap& markers, const BinaryMask& region,
                   bool boundary_lines = true);

}  // namespace thermoscan::imgproc
