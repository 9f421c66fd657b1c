#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermoscan/pipeline.hpp"
#include "thermoscan/thermogram.hpp"

namespace thermoscan {

struct TemperatureSample {
  int row = 0;
  int col = 0;
  float temp_c = 0.0f;
  friend bool operator==(const TemperatureSample&, const TemperatureSample&) = default;
};

// Samples of one module, in raster order.
struct ModuleTemperatures {
  int label = 0;
  std::vector<TemperatureSample> samples;
};

// edges.size() == counts.size() + 1; the last bin is closed on the right.
struct TemperatureHistogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  friend bool operator==(const TemperatureHistogram&, const TemperatureHistogram&) = default;
};

struct ThermalStats {
  std::size_t n = 0;
  double mean_c = 0.0;
  double std_c = 0.0;  // population
  double threshold_c = 0.0;  // mean_c + std_c
  double min_c = 0.0;
  double max_c = 0.0;
  TemperatureHistogram histogram;
  friend bool operator==(const ThermalStats&, const ThermalStats&) = default;
};

struct DefectBlob {
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  double peak_c = 0.0;
  std::size_t size = 0;
  friend bool operator==(const DefectBlob&, const DefectBlob&) = default;
};

enum class Verdict { Healthy, Suspect };
const char* to_string(Verdict v) noexcept;

// Side-by-side check against a fixed rise over the module mean.
struct FixedDeltaComparison {
  double delta_c = 0.0;
  std::size_t pixel_count = 0;
  Verdict verdict = Verdict::Healthy;
  friend bool operator==(const FixedDeltaComparison&, const FixedDeltaComparison&) = default;
};

struct ModuleReport {
  int label = 0;
  ThermalStats stats;
  std::vector<Point> defect_pixels;  // raster order
  double defect_fraction = 0.0;
  std::vector<DefectBlob> blobs;  // 8-connected, raster order of first pixel
  Verdict verdict = Verdict::Healthy;
  std::optional<FixedDeltaComparison> fixed_delta;
  friend bool operator==(const ModuleReport&, const ModuleReport&) = default;
};

struct ReportSummary {
  std::size_t module_count = 0;
  std::size_t suspect_count = 0;
  std::size_t healthy_count = 0;
  std::size_t defect_pixel_count = 0;
  std::vector<int> suspect_labels;
  friend bool operator==(const ReportSummary&, const ReportSummary&) = default;
};

inline constexpr int kReportVersion = 1;

struct DefectReport {
  int version = kReportVersion;
  std::string thermogram_id;
  std::vector<ModuleReport> modules;
  ReportSummary summary;
  friend bool operator==(const DefectReport&, const DefectReport&) = default;
};

// Smallest defect blob that marks a module suspect. Set from
// tools/calibrate_blob_size on noise-only modules; see README.
inline constexpr int kDefaultMinBlobSize = 40;

struct AnalysisConfig {
  int histogram_bins = 64;
  int min_blob_size = kDefaultMinBlobSize;
  std::optional<double> fixed_delta_c;
  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

// Throws InvalidConfig.
void validate(const AnalysisConfig& cfg);
nlohmann::json to_json(const AnalysisConfig& cfg);
AnalysisConfig analysis_config_from_json(const nlohmann::json& j);

// One entry per segmented module, in label order. Throws ShapeMismatch.
std::vector<ModuleTemperatures> extract_module_temperatures(const Thermogram& t,
                                                            const SegmentationResult& seg);

// Throws EmptyModule, or InvalidParameter when bins < 2.
ThermalStats module_stats(const ModuleTemperatures& mt, int bins = 64);

// F = samples strictly above stats.threshold_c.
ModuleReport detect_defects(const ModuleTemperatures& mt, const ThermalStats& stats,
                            const AnalysisConfig& cfg = {});

DefectReport analyze(const Thermogram& t, const SegmentationResult& seg,
                     const AnalysisConfig& cfg = {});

// Throws OutOfBounds.
float query_temperature(const Thermogram& t, int row, int col);

// Reals are rounded to 6 decimals.
nlohmann::json to_json(const DefectReport& r);
// Throws BadDocument on a malformed document.
DefectReport defect_report_from_json(const nlohmann::json& j);

nlohmann::json regions_to_json(const SegmentationResult& seg, const std::string& thermogram_id);

double round6(double v) noexcept;

// Two-space indented dump plus a trailing newline; the on-disk and on-wire form.
std::string dump_document(const nlohmann::json& j);

}  // namespace thermoscan
