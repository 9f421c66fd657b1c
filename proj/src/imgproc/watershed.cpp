#include "thermoscan/imgproc/watershed.hpp"

#include <cstdint>
#include <queue>
#include <vector>

namespace thermoscan::imgproc {
namespace {

struct Entry {
  float value;
  std::uint64_t seq;
  std::int32_t index;
  std::int32_t label;
  bool seed;
};

struct Later {
  bool operator()(const Entry& a, const Entry& b) const noexcept {
    if (a.value != b.value) return a.value > b.value;
    return a.seq > b.seq;
  }
};

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

LabelMap flood(const GrayImage& relief, const LabelMap& markers, const BinaryMask* region,
               bool boundary_lines) {
  const int w = relief.width();
  const int h = relief.height();
  if (markers.width() != w || markers.height() != h) {
    throw Error(Errc::ShapeMismatch, "markers and relief differ in size");
  }
  if (region != nullptr && (region->width() != w || region->height() != h)) {
    throw Error(Errc::ShapeMismatch, "flood region and relief differ in size");
  }

  LabelMap out = markers;
  const std::int32_t boundary = markers.boundary_label();
  std::priority_queue<Entry, std::vector<Entry>, Later> queue;
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < markers.labels.size(); ++i) {
    if (markers.labels[i] > 0) {
      queue.push({relief[i], seq++, static_cast<std::int32_t>(i), markers.labels[i], true});
    }
  }
  if (queue.empty()) throw Error(Errc::NoMarkers, "watershed needs at least one marker pixel");

  auto& lab = out.labels;
  while (!queue.empty()) {
    const Entry e = queue.top();
    queue.pop();
    const int r = e.index / w;
    const int c = e.index % w;
    if (!e.seed) {
      if (lab[e.index] != 0) continue;
      bool touches_other = false;
      if (boundary_lines) {
        for (int k = 0; k < 8 && !touches_other; ++k) {
          const int nr = r + kDr[k];
          const int nc = c + kDc[k];
          if (!lab.in_bounds(nr, nc)) continue;
          const std::int32_t n = lab(nr, nc);
          touches_other = n > 0 && n != boundary && n != e.label;
        }
      }
      if (touches_other) {
        lab[e.index] = boundary;
        continue;
      }
      lab[e.index] = e.label;
    }
    for (int k = 0; k < 8; ++k) {
      const int nr = r + kDr[k];
      const int nc = c + kDc[k];
      if (!lab.in_bounds(nr, nc) || lab(nr, nc) != 0) continue;
      if (region != nullptr && !(*region)(nr, nc)) continue;
      const std::int32_t ni = nr * w + nc;
      queue.push({relief[static_cast<std::size_t>(ni)], seq++, ni, e.label, false});
    }
  }
  if (boundary_lines) {
    // Pixels walled in by watershed lines before any basin reached them.
    for (std::size_t i = 0; i < lab.size(); ++i) {
      if (lab[i] == 0 && (region == nullptr || (*region)[i])) lab[i] = boundary;
    }
  }
  return out;
}

}  // namespace

LabelMap watershed(const GrayImage& relief, const LabelMap& markers, bool boundary_lines) {
  return flood(relief, markers, nullptr, boundary_lines);
}

LabelMap watershed(const GrayImage& relief, const LabelMap& markers, const BinaryMask& region,
                   bool boundary_lines) {
  return flood(relief, markers, &region, boundary_lines);
}

}  // namespace thermoscan::imgproc
