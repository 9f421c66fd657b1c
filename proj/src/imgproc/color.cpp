#include "thermoscan/imgproc/color.hpp"

#include "thermoscan/parallel.hpp"

namespace thermoscan::imgproc {

GrayImage to_grayscale(const VisualImage& img) {
  GrayImage out(img.width(), img.height());
  parallel_for(static_cast<std::size_t>(img.height()), [&](std::size_t r) {
    const int row = static_cast<int>(r);
    for (int col = 0; col < img.width(); ++col) {
      const double y = kLumaR * img.at(row, col, 0) + kLumaG * img.at(row, col, 1) +
                       kLumaB * img.at(row, col, 2);
      out(row, col) = static_cast<float>(std::clamp(y, 0.0, 1.0));
    }
  });
  return out;
}

BinaryMask threshold_fixed(const GrayImage& g, float th) {
  if (!(th >= 0.0f && th <= 1.0f)) {
    throw Error(Errc::InvalidParameter, "threshold must lie in [0,1]");
  }
  BinaryMask out(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] >= th ? 1 : 0;
  return out;
}

BinaryMask threshold_above_bin(const GrayImage& g, int bin) {
  BinaryMask out(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = quantize(g[i]) > bin ? 1 : 0;
  return out;
}

}  // namespace thermoscan::imgproc
