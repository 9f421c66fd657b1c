#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermoscan/imgproc/morphology.hpp"
#include "thermoscan/raster.hpp"
#include "thermoscan/thermogram.hpp"

namespace thermoscan {

enum class ElementShape { Box, Cross };

// Every stage knob of the segmentation flow. Serialized as a flat JSON object
// whose keys match the member names below (structuring element as
// "structuring_element" + "structuring_element_size").
struct PipelineConfig {
  int dhe_smoothing_window = 5;
  int dhe_min_partition_span = 8;
  int clahe_tiles_x = 2;
  int clahe_tiles_y = 2;
  double clahe_clip_limit = 4.0;
  double gaussian_sigma = 1.0;
  ElementShape structuring_element = ElementShape::Box;
  int structuring_element_size = 5;  // odd; box side or cross span
  double marker_foreground_fraction = 0.5;
  int background_dilation_iterations = 3;
  int connectivity = 8;
  double min_module_area_fraction = 0.005;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Throws InvalidConfig naming the offending field.
void validate(const PipelineConfig& cfg);
imgproc::StructuringElement structuring_element(const PipelineConfig& cfg);

nlohmann::json to_json(const PipelineConfig& cfg);
// Missing keys keep their defaults; unknown keys, wrong types and out-of-range
// values raise InvalidConfig.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

// Inclusive pixel bounds.
struct BoundingBox {
  int row0 = 0;
  int col0 = 0;
  int row1 = 0;
  int col1 = 0;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ModuleRegion {
  int label = 0;
  std::size_t pixel_count = 0;
  BoundingBox bbox;
  std::vector<Point> boundary;  // closed outer contour, clockwise
  bool touches_border = false;

  friend bool operator==(const ModuleRegion&, const ModuleRegion&) = default;
};

// Intermediate rasters, kept for inspection when requested.
struct StageSnapshots {
  GrayImage gray;
  GrayImage dhe;
  GrayImage clahe;
  GrayImage enhanced;  // after Gaussian smoothing
  BinaryMask binary;
  BinaryMask opened;
  GrayImage relief;
  BinaryMask flood_region;
  LabelMap markers;
  LabelMap watershed;

  friend bool operator==(const StageSnapshots&, const StageSnapshots&) = default;
};

struct SegmentationResult {
  BinaryMask mask;  // union of the emitted module regions
  LabelMap labels;  // consecutive labels 1..modules.size()
  std::vector<ModuleRegion> modules;
  PipelineConfig config;
  int otsu_threshold = 0;
  std::optional<StageSnapshots> stages;

  friend bool operator==(const SegmentationResult&, const SegmentationResult&) = default;
};

// Contrast enhancement chain: dynamic equalization, CLAHE, Gaussian smoothing.
GrayImage enhance(const GrayImage& gray, const PipelineConfig& cfg);

// Sure-foreground seeds: per connected component, the pixels whose distance to
// the background is at least marker_foreground_fraction times that
// component's peak distance, then labelled by connected components.
LabelMap build_markers(const BinaryMask& opened, const PipelineConfig& cfg);

// Moore-neighbour outer contour of `label`, clockwise, starting and ending at
// the label's raster-first pixel. A lone pixel yields a single point.
// Throws LabelNotFound.
std::vector<Point> trace_boundary(const LabelMap& labels, int label);

// Full segmentation flow. Returns a result with an empty module list when
// nothing survives.
SegmentationResult segment_modules(const Thermogram& t, const PipelineConfig& cfg = {},
                                   bool keep_stages = false);

// As segment_modules, but throws NoModulesFound when no region survives.
SegmentationResult segment(const Thermogram& t, const PipelineConfig& cfg = {},
                           bool keep_stages = false);

}  // namespace thermoscan
