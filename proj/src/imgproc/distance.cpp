#include "thermoscan/imgproc/distance.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "thermoscan/parallel.hpp"

namespace thermoscan::imgproc {
namespace {

constexpr double kFar = 1e20;

// Squared-distance lower envelope of parabolas over f[0..n), written to d.
// v and z are scratch of size n and n + 1.
void envelope_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  const auto intersect = [&](int q, int p) {
    return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
           (2.0 * (q - p));
  };
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

DistanceField distance_transform(const BinaryMask& b) {
  const int w = b.width();
  const int h = b.height();
  DistanceField out(w, h, 0.0);
  if (b.empty()) return out;

  // One-pixel background frame.
  const int pw = w + 2;
  const int ph = h + 2;
  std::vector<double> grid(static_cast<std::size_t>(pw) * ph, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (b(r, c)) grid[static_cast<std::size_t>(r + 1) * pw + (c + 1)] = kFar;
    }
  }

  parallel_for(static_cast<std::size_t>(pw), [&](std::size_t cc) {
    const int c = static_cast<int>(cc);
    std::vector<double> f(ph), d(ph), z(ph + 1);
    std::vector<int> v(ph);
    for (int r = 0; r < ph; ++r) f[r] = grid[static_cast<std::size_t>(r) * pw + c];
    envelope_1d(f.data(), d.data(), ph, v, z);
    for (int r = 0; r < ph; ++r) grid[static_cast<std::size_t>(r) * pw + c] = d[r];
  });
  parallel_for(static_cast<std::size_t>(ph), [&](std::size_t rr) {
    const int r = static_cast<int>(rr);
    std::vector<double> d(pw), z(pw + 1);
    std::vector<int> v(pw);
    double* row = grid.data() + static_cast<std::size_t>(r) * pw;
    envelope_1d(row, d.data(), pw, v, z);
    std::copy(d.begin(), d.end(), row);
  });

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      out(r, c) = b(r, c) ? std::sqrt(grid[static_cast<std::size_t>(r + 1) * pw + (c + 1)]) : 0.0;
    }
  }
  return out;
}

}  // namespace thermoscan::imgproc
