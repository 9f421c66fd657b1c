#include "thermoscan/imgproc/filter.hpp"

#include <algorithm>
#include <cmath>

#include "thermoscan/parallel.hpp"

namespace thermoscan::imgproc {

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    throw Error(Errc::InvalidParameter, "gaussian sigma must be > 0");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

int reflect101(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

GrayImage gaussian_blur(const GrayImage& g, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = g.width();
  const int h = g.height();
  if (g.empty()) return g;

  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t rr) {
    const int r = static_cast<int>(rr);
    const auto src = g.row(r);
    for (int c = 0; c < w; ++c) {
      double acc = 0;
      for (int t = -radius; t <= radius; ++t) acc += k[t + radius] * src[reflect101(c + t, w)];
      tmp[static_cast<std::size_t>(r) * w + c] = acc;
    }
  });

  GrayImage out(w, h);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t rr) {
    const int r = static_cast<int>(rr);
    for (int c = 0; c < w; ++c) {
      double acc = 0;
      for (int t = -radius; t <= radius; ++t) {
        acc += k[t + radius] * tmp[static_cast<std::size_t>(reflect101(r + t, h)) * w + c];
      }
      out(r, c) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
    }
  });
  return out;
}

}  // namespace thermoscan::imgproc
