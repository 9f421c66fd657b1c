#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermoscan/raster.hpp"
#include "thermoscan/thermogram.hpp"

namespace thermoscan {

struct HotSpot {
  int module = 0;       // row-major index into the module grid
  double row = 0;       // center, module-local pixel coordinates
  double col = 0;
  double radius = 3;    // half-maximum radius of the Gaussian profile, pixels
  double delta_c = 10;  // peak excess temperature
};

// Grid of identical rectangular modules on a uniform background. The grid
// origin may be negative or push modules past the right/bottom edge, which
// produces partially visible modules.
struct SyntheticSpec {
  int rows = 2;
  int cols = 3;
  int module_width = 60;
  int module_height = 36;
  int gap = 6;
  int margin = 16;
  std::optional<int> origin_row;  // default: margin
  std::optional<int> origin_col;
  std::optional<int> image_width;  // default: grid plus margins
  std::optional<int> image_height;
  double background_c = 30.0;
  double module_c = 45.0;
  std::vector<HotSpot> hot_spots;
  double noise_std_c = 0.0;
  std::uint64_t seed = 42;
};

struct SyntheticThermogram {
  Thermogram thermogram;
  LabelMap truth_labels;     // module index + 1 on visible module pixels
  BinaryMask truth_defects;  // pixels where a hot spot's noiseless excess > delta_c / 2
};

// Throws SpecInvalid.
void validate(const SyntheticSpec& spec);
SyntheticThermogram generate_synthetic(const SyntheticSpec& spec);

// Strict: unknown keys and wrong types raise SpecInvalid.
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticSpec& spec);

}  // namespace thermoscan
