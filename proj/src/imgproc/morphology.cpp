#include "thermoscan/imgproc/morphology.hpp"

#include <algorithm>

namespace thermoscan::imgproc {
namespace {

// Combines every shifted copy b(row + dy, col + dx) into out. Pixels whose
// source falls outside the image take `outside`.
template <class Combine>
BinaryMask shift_combine(const BinaryMask& b, const std::vector<Offset>& offsets,
                         std::uint8_t init, std::uint8_t outside, Combine combine) {
  const int w = b.width();
  const int h = b.height();
  BinaryMask out(w, h, init);
  for (const Offset& o : offsets) {
    for (int r = 0; r < h; ++r) {
      auto dst = out.row(r);
      const int sr = r + o.dy;
      if (sr < 0 || sr >= h) {
        for (int c = 0; c < w; ++c) dst[c] = combine(dst[c], outside);
        continue;
      }
      const auto src = b.row(sr);
      const int c0 = std::clamp(-o.dx, 0, w);
      const int c1 = std::clamp(w - o.dx, 0, w);
      for (int c = 0; c < c0; ++c) dst[c] = combine(dst[c], outside);
      for (int c = c0; c < c1; ++c) dst[c] = combine(dst[c], src[c + o.dx]);
      for (int c = c1; c < w; ++c) dst[c] = combine(dst[c], outside);
    }
  }
  return out;
}

}  // namespace

StructuringElement::StructuringElement(std::vector<Offset> offsets) : offsets_(std::move(offsets)) {
  if (offsets_.empty()) throw Error(Errc::InvalidParameter, "structuring element is empty");
  if (std::find(offsets_.begin(), offsets_.end(), Offset{0, 0}) == offsets_.end()) {
    throw Error(Errc::InvalidParameter, "structuring element must contain its anchor (0,0)");
  }
}

StructuringElement StructuringElement::box(int width, int height) {
  if (width < 1 || height < 1 || width % 2 == 0 || height % 2 == 0) {
    throw Error(Errc::InvalidParameter, "box element sizes must be odd and positive");
  }
  std::vector<Offset> o;
  for (int dy = -height / 2; dy <= height / 2; ++dy) {
    for (int dx = -width / 2; dx <= width / 2; ++dx) o.push_back({dx, dy});
  }
  return StructuringElement(std::move(o));
}

StructuringElement StructuringElement::cross(int arm) {
  if (arm < 0) throw Error(Errc::InvalidParameter, "cross arm must be >= 0");
  std::vector<Offset> o{{0, 0}};
  for (int d = 1; d <= arm; ++d) {
    o.push_back({-d, 0});
    o.push_back({d, 0});
    o.push_back({0, -d});
    o.push_back({0, d});
  }
  return StructuringElement(std::move(o));
}

StructuringElement StructuringElement::reflected() const {
  std::vector<Offset> o;
  o.reserve(offsets_.size());
  for (const Offset& k : offsets_) o.push_back({-k.dx, -k.dy});
  return StructuringElement(std::move(o));
}

BinaryMask erode(const BinaryMask& b, const StructuringElement& k) {
  return shift_combine(b, k.offsets(), 1, 0,
                       [](std::uint8_t a, std::uint8_t v) -> std::uint8_t { return a & v; });
}

BinaryMask dilate(const BinaryMask& b, const StructuringElement& k) {
  return shift_combine(b, k.reflected().offsets(), 0, 0,
                       [](std::uint8_t a, std::uint8_t v) -> std::uint8_t { return a | v; });
}

BinaryMask open(const BinaryMask& b, const StructuringElement& k) { return dilate(erode(b, k), k); }

BinaryMask complement(const BinaryMask& b) {
  BinaryMask out(b.width(), b.height());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i] ? 0 : 1;
  return out;
}

}  // namespace thermoscan::imgproc
