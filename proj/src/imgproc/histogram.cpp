#include "thermoscan/imgproc/histogram.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "thermoscan/imgproc/color.hpp"
#include "thermoscan/parallel.hpp"

namespace thermoscan::imgproc {
namespace {

using LookupTable = std::array<double, 256>;

GrayImage apply_lut(const GrayImage& g, const LookupTable& lut) {
  GrayImage out(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = static_cast<float>(std::clamp(lut[quantize(g[i])], 0.0, 1.0));
  }
  return out;
}

bool is_constant(const Histogram256& h) {
  return std::count_if(h.begin(), h.end(), [](std::uint64_t c) { return c != 0; }) <= 1;
}

}  // namespace

Histogram256 histogram(const GrayImage& g) {
  Histogram256 h{};
  for (float v : g.values()) ++h[quantize(v)];
  return h;
}

GrayImage equalize_global(const GrayImage& g) {
  const Histogram256 h = histogram(g);
  LookupTable lut{};
  const double n = static_cast<double>(g.size());
  std::uint64_t acc = 0;
  for (int b = 0; b < 256; ++b) {
    acc += h[b];
    lut[b] = n > 0 ? static_cast<double>(acc) / n : 0.0;
  }
  return apply_lut(g, lut);
}

std::vector<double> smooth_histogram(const Histogram256& h, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(Errc::InvalidParameter, "smoothing window must be odd and >= 1");
  }
  const int half = window / 2;
  std::vector<double> s(256);
  for (int b = 0; b < 256; ++b) {
    const int lo = std::max(0, b - half);
    const int hi = std::min(255, b + half);
    double sum = 0;
    for (int k = lo; k <= hi; ++k) sum += static_cast<double>(h[k]);
    s[b] = sum / (hi - lo + 1);
  }
  return s;
}

std::vector<Partition> dhe_partitions(const Histogram256& h, int smoothing_window, int min_span) {
  if (min_span < 1 || min_span > 256) {
    throw Error(Errc::InvalidParameter, "min_partition_span must be in [1, 256]");
  }
  const auto smoothed = smooth_histogram(h, smoothing_window);
  int first = 0;
  while (first < 256 && h[first] == 0) ++first;
  if (first == 256) return {};
  int last = 255;
  while (h[last] == 0) --last;

  std::vector<int> splits;
  int i = first + 1;
  while (i < last) {
    if (smoothed[i] < smoothed[i - 1]) {
      int j = i;
      while (j + 1 <= last && smoothed[j + 1] == smoothed[i]) ++j;
      if (j + 1 <= last && smoothed[j + 1] > smoothed[i]) {
        const int m = (i + j) / 2;
        if (m < last) splits.push_back(m);
      }
      i = j + 1;
    } else {
      ++i;
    }
  }

  std::vector<Partition> parts;
  int lo = first;
  for (int m : splits) {
    parts.push_back({lo, m});
    lo = m + 1;
  }
  parts.push_back({lo, last});

  while (parts.size() > 1) {
    std::size_t narrow = parts.size();
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (parts[k].span() < min_span &&
          (narrow == parts.size() || parts[k].span() < parts[narrow].span())) {
        narrow = k;
      }
    }
    if (narrow == parts.size()) break;
    std::size_t into;
    if (narrow == 0) {
      into = 1;
    } else if (narrow + 1 == parts.size()) {
      into = narrow - 1;
    } else {
      into = parts[narrow + 1].span() < parts[narrow - 1].span() ? narrow + 1 : narrow - 1;
    }
    const std::size_t left = std::min(narrow, into);
    parts[left] = {parts[left].lo, parts[left + 1].hi};
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(left) + 1);
  }
  return parts;
}

GrayImage dhe(const GrayImage& g, int smoothing_window, int min_partition_span) {
  const Histogram256 h = histogram(g);
  const auto parts = dhe_partitions(h, smoothing_window, min_partition_span);
  if (parts.empty() || is_constant(h)) return g;

  double total_span = 0;
  for (const auto& p : parts) total_span += p.span();

  LookupTable lut{};
  double consumed = 0;
  for (const auto& p : parts) {
    const double out_lo = 255.0 * consumed / total_span;
    const double out_width = 255.0 * p.span() / total_span;
    consumed += p.span();
    std::uint64_t mass = 0;
    for (int b = p.lo; b <= p.hi; ++b) mass += h[b];
    std::uint64_t acc = 0;
    for (int b = p.lo; b <= p.hi; ++b) {
      acc += h[b];
      const double cdf = mass > 0 ? static_cast<double>(acc) / static_cast<double>(mass) : 0.0;
      lut[b] = (out_lo + out_width * cdf) / 255.0;
    }
  }
  // Bins outside the occupied range carry no pixels; keep the table monotone.
  for (int b = 0; b < parts.front().lo; ++b) lut[b] = 0.0;
  for (int b = parts.back().hi + 1; b < 256; ++b) lut[b] = 1.0;
  return apply_lut(g, lut);
}

std::array<double, 256> clahe_tile_lut(const Histogram256& tile_hist, double clip_limit) {
  std::uint64_t n = 0;
  for (auto c : tile_hist) n += c;
  std::array<double, 256> lut{};
  if (n == 0) return lut;

  const double raw_clip = clip_limit * static_cast<double>(n) / 256.0;
  const std::uint64_t clip =
      raw_clip >= static_cast<double>(n)
          ? n
          : std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(raw_clip)));
  Histogram256 h = tile_hist;
  std::uint64_t excess = 0;
  for (auto& c : h) {
    if (c > clip) {
      excess += c - clip;
      c = clip;
    }
  }
  const std::uint64_t per_bin = excess / 256;
  for (auto& c : h) c += per_bin;
  h[255] += excess % 256;

  std::uint64_t acc = 0;
  for (int b = 0; b < 256; ++b) {
    acc += h[b];
    lut[b] = static_cast<double>(acc) / static_cast<double>(n);
  }
  return lut;
}

GrayImage clahe(const GrayImage& g, int tiles_x, int tiles_y, double clip_limit) {
  if (tiles_x < 1 || tiles_y < 1) throw Error(Errc::InvalidParameter, "tile counts must be >= 1");
  if (!(clip_limit >= 1.0)) throw Error(Errc::InvalidParameter, "clip_limit must be >= 1");
  if (g.width() < tiles_x || g.height() < tiles_y) {
    throw Error(Errc::InvalidParameter, "image smaller than the tile grid");
  }
  const int w = g.width();
  const int h = g.height();
  std::vector<int> xb(tiles_x + 1), yb(tiles_y + 1);
  for (int i = 0; i <= tiles_x; ++i) xb[i] = static_cast<int>(static_cast<long long>(i) * w / tiles_x);
  for (int j = 0; j <= tiles_y; ++j) yb[j] = static_cast<int>(static_cast<long long>(j) * h / tiles_y);

  std::vector<LookupTable> luts(static_cast<std::size_t>(tiles_x) * tiles_y);
  parallel_for(luts.size(), [&](std::size_t t) {
    const int tx = static_cast<int>(t) % tiles_x;
    const int ty = static_cast<int>(t) / tiles_x;
    Histogram256 hist{};
    for (int r = yb[ty]; r < yb[ty + 1]; ++r) {
      for (int c = xb[tx]; c < xb[tx + 1]; ++c) ++hist[quantize(g(r, c))];
    }
    luts[t] = clahe_tile_lut(hist, clip_limit);
  });

  // For each coordinate: the two neighbouring tile indices and the weight of
  // the second. Outside the first/last tile centre the edge tile is replicated.
  struct Blend {
    int a, b;
    double wb;
  };
  const auto blends = [](const std::vector<int>& bounds, int n) {
    const int tiles = static_cast<int>(bounds.size()) - 1;
    std::vector<double> centers(tiles);
    for (int i = 0; i < tiles; ++i) centers[i] = (bounds[i] + bounds[i + 1] - 1) / 2.0;
    std::vector<Blend> out(n);
    for (int x = 0; x < n; ++x) {
      if (x <= centers.front()) {
        out[x] = {0, 0, 0.0};
      } else if (x >= centers.back()) {
        out[x] = {tiles - 1, tiles - 1, 0.0};
      } else {
        int i = 0;
        while (centers[i + 1] <= x) ++i;
        out[x] = {i, i + 1, (x - centers[i]) / (centers[i + 1] - centers[i])};
      }
    }
    return out;
  };
  const auto bx = blends(xb, w);
  const auto by = blends(yb, h);

  GrayImage out(w, h);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t rr) {
    const int r = static_cast<int>(rr);
    const Blend& vy = by[r];
    for (int c = 0; c < w; ++c) {
      const Blend& vx = bx[c];
      const int q = quantize(g(r, c));
      const auto lut = [&](int tx, int ty) { return luts[static_cast<std::size_t>(ty) * tiles_x + tx][q]; };
      const double top = (1 - vx.wb) * lut(vx.a, vy.a) + vx.wb * lut(vx.b, vy.a);
      const double bottom = (1 - vx.wb) * lut(vx.a, vy.b) + vx.wb * lut(vx.b, vy.b);
      out(r, c) = static_cast<float>(std::clamp((1 - vy.wb) * top + vy.wb * bottom, 0.0, 1.0));
    }
  });
  return out;
}

int otsu_threshold(const Histogram256& h) {
  using boost::multiprecision::int512_t;
  std::uint64_t n = 0;
  int512_t sum = 0;
  for (int b = 0; b < 256; ++b) {
    n += h[b];
    sum += int512_t(b) * h[b];
  }
  if (n == 0) throw Error(Errc::EmptyHistogram, "Otsu threshold of an empty histogram");

  // w0*w1*(mu0-mu1)^2 = (N*S0 - n0*S)^2 / (N^2 * n0 * n1); the N^2 factor is
  // common to every t, so candidates are compared on num^2 / (n0 * n1).
  // Thresholds below the first occupied bin leave class 0 empty and are not
  // candidates; a one-bin histogram therefore yields that bin.
  int best = 0;
  while (h[best] == 0) ++best;
  int512_t best_num2 = 0;
  int512_t best_den = 1;
  std::uint64_t n0 = 0;
  int512_t s0 = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += h[t];
    s0 += int512_t(t) * h[t];
    const std::uint64_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const int512_t num = int512_t(n) * s0 - int512_t(n0) * sum;
    const int512_t num2 = num * num;
    const int512_t den = int512_t(n0) * int512_t(n1);
    if (num2 * best_den > best_num2 * den) {
      best = t;
      best_num2 = num2;
      best_den = den;
    }
  }
  return best;
}

}  // namespace thermoscan::imgproc
