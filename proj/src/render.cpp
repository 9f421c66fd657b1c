#include "thermoscan/render.hpp"

#include <algorithm>
#include <cmath>

namespace thermoscan::render {

std::vector<std::uint8_t> overlay_rgb8(const Thermogram& t, const SegmentationResult* seg,
                                       const DefectReport* report) {
  std::vector<std::uint8_t> rgb = t.visual().to_rgb8();
  const int w = t.width();
  const auto px = [&](int r, int c) { return (static_cast<std::size_t>(r) * w + c) * 3; };
  if (report != nullptr) {
    for (const auto& m : report->modules) {
      for (const auto& p : m.defect_pixels) {
        if (p.row < 0 || p.col < 0 || p.row >= t.height() || p.col >= w) continue;
        const std::size_t i = px(p.row, p.col);
        const auto blend = [](std::uint8_t base, double target) {
          const double v = (1.0 - kDefectOpacity) * base + kDefectOpacity * target;
          return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        };
        rgb[i] = blend(rgb[i], 255.0);
        rgb[i + 1] = blend(rgb[i + 1], 0.0);
        rgb[i + 2] = blend(rgb[i + 2], 0.0);
      }
    }
  }
  if (seg != nullptr) {
    for (const auto& m : seg->modules) {
      for (const auto& p : m.boundary) {
        if (p.row < 0 || p.col < 0 || p.row >= t.height() || p.col >= w) continue;
        const std::size_t i = px(p.row, p.col);
        rgb[i] = 0;
        rgb[i + 1] = 255;
        rgb[i + 2] = 0;
      }
    }
  }
  return rgb;
}

png::Bytes overlay_png(const Thermogram& t, const SegmentationResult* seg,
                       const DefectReport* report) {
  return png::encode_rgb8(t.width(), t.height(), overlay_rgb8(t, seg, report));
}

png::Bytes label_png(const LabelMap& labels) {
  std::vector<std::uint16_t> v(labels.labels.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::int32_t l = labels.labels[i];
    if (l < 0 || l > 65535) throw Error(Errc::InvalidParameter, "label does not fit 16 bits");
    v[i] = static_cast<std::uint16_t>(l);
  }
  return png::encode_gray16(labels.width(), labels.height(), v);
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {
      "gray", "dhe", "clahe", "enhanced", "binary", "opened",
      "relief", "flood_region", "markers", "watershed"};
  return names;
}

std::optional<png::Bytes> stage_png(const StageSnapshots& st, std::string_view name) {
  if (name == "gray") return png::encode_gray(st.gray);
  if (name == "dhe") return png::encode_gray(st.dhe);
  if (name == "clahe") return png::encode_gray(st.clahe);
  if (name == "enhanced") return png::encode_gray(st.enhanced);
  if (name == "binary") return png::encode_mask(st.binary);
  if (name == "opened") return png::encode_mask(st.opened);
  if (name == "relief") return png::encode_gray(st.relief);
  if (name == "flood_region") return png::encode_mask(st.flood_region);
  if (name == "markers") return label_png(st.markers);
  if (name == "watershed") return label_png(st.watershed);
  return std::nullopt;
}

}  // namespace thermoscan::render
