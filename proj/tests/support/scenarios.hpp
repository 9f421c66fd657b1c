#pragma once

// Seeded synthetic scenario families shared by the tests, the acceptance run
// and tools/calibrate_blob_size.

#include <cstdint>
#include <random>

#include "thermoscan/synthetic.hpp"

namespace thermoscan::scenarios {

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Grids 1x1 .. 4x6 at noise 0.5 C, with occasional hot spots. Every third
// scenario shifts the grid left so the first column is cut in half by the
// image edge. Scenario 0 is a single module, scenario 1 the full 4x6 grid.
inline SyntheticSpec segmentation(int i) {
  std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(i));
  SyntheticSpec s;
  s.rows = uniform(rng, 1, 4);
  s.cols = uniform(rng, 1, 6);
  if (i == 0) s.rows = s.cols = 1;
  if (i == 1) {
    s.rows = 4;
    s.cols = 6;
  }
  s.module_width = uniform(rng, 40, 70);
  s.module_height = uniform(rng, 28, 48);
  s.gap = uniform(rng, 4, 10);
  s.margin = uniform(rng, 10, 24);
  s.noise_std_c = 0.5;
  s.seed = 7 + static_cast<std::uint64_t>(i);
  if (i % 3 == 2) s.origin_col = -s.module_width / 2;
  const int modules = s.rows * s.cols;
  const int spots = uniform(rng, 0, 2);
  for (int k = 0; k < spots; ++k) {
    HotSpot h;
    h.module = uniform(rng, 0, modules - 1);
    h.row = uniform(rng, 8, s.module_height - 9);
    h.col = uniform(rng, 8, s.module_width - 9);
    h.radius = uniform(rng, 3, 6);
    h.delta_c = 10.0;
    s.hot_spots.push_back(h);
  }
  return s;
}

// Grids up to 2x3 at noise 0.3 C. With delta_c > 0, one or two modules carry
// a hot spot of that rise (radius 3..5 px); with delta_c == 0 there are none.
inline SyntheticSpec detection(int i, double delta_c) {
  std::mt19937_64 rng(5000 + static_cast<std::uint64_t>(i));
  SyntheticSpec s;
  s.rows = uniform(rng, 1, 2);
  s.cols = uniform(rng, 1, 3);
  s.module_width = uniform(rng, 40, 70);
  s.module_height = uniform(rng, 28, 48);
  s.gap = uniform(rng, 5, 10);
  s.margin = uniform(rng, 12, 24);
  s.noise_std_c = 0.3;
  s.seed = 90 + static_cast<std::uint64_t>(i);
  const int modules = s.rows * s.cols;
  const int spots = std::min(modules, uniform(rng, 1, 2));
  int first = uniform(rng, 0, modules - 1);
  for (int k = 0; k < spots; ++k) {
    HotSpot h;
    h.module = (first + k) % modules;
    h.row = uniform(rng, 9, s.module_height - 10);
    h.col = uniform(rng, 9, s.module_width - 10);
    h.radius = uniform(rng, 3, 5);
    h.delta_c = delta_c;
    if (delta_c > 0) s.hot_spots.push_back(h);
  }
  return s;
}

}  // namespace thermoscan::scenarios
