#pragma once

#include <vector>

#include "thermoscan/raster.hpp"

namespace thermoscan::imgproc {

struct Offset {
  int dx = 0;  // column offset
  int dy = 0;  // row offset
  friend bool operator==(const Offset&, const Offset&) = default;
};

// Anchor-centred set of offsets; never empty and always contains (0,0).
class StructuringElement {
 public:
  // Throws InvalidParameter if the set is empty or lacks the origin.
  explicit StructuringElement(std::vector<Offset> offsets);

  // width x height rectangle centred on the anchor; both sizes odd.
  static StructuringElement box(int width, int height);
  static StructuringElement box(int size) { return box(size, size); }
  // Plus shape with arms of the given length.
  static StructuringElement cross(int arm);

  StructuringElement reflected() const;
  const std::vector<Offset>& offsets() const noexcept { return offsets_; }

 private:
  std::vector<Offset> offsets_;
};

// min over K of b(row + dy, col + dx); outside the image reads as 0.
BinaryMask erode(const BinaryMask& b, const StructuringElement& k);
// max over K of b(row - dy, col - dx); outside the image reads as 0.
BinaryMask dilate(const BinaryMask& b, const StructuringElement& k);
// Erosion followed by dilation.
BinaryMask open(const BinaryMask& b, const StructuringElement& k);

BinaryMask complement(const BinaryMask& b);

}  // namespace thermoscan::imgproc
