#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thermoscan/analysis.hpp"
#include "thermoscan/pipeline.hpp"
#include "thermoscan/png_io.hpp"

namespace thermoscan::render {

inline constexpr double kDefectOpacity = 0.6;

// Visual image with defect pixels blended towards pure red at 60% opacity and
// module boundaries drawn 1 px pure green on top. Either layer may be absent.
std::vector<std::uint8_t> overlay_rgb8(const Thermogram& t, const SegmentationResult* seg,
                                       const DefectReport* report);
png::Bytes overlay_png(const Thermogram& t, const SegmentationResult* seg,
                       const DefectReport* report);

// Labels as 16-bit grey values; throws InvalidParameter above 65535.
png::Bytes label_png(const LabelMap& labels);

// Names accepted by stage_png, in pipeline order.
const std::vector<std::string>& stage_names();
// nullopt for an unknown name.
std::optional<png::Bytes> stage_png(const StageSnapshots& st, std::string_view name);

}  // namespace thermoscan::render
